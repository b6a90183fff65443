"""Conversation log analytics.

Computes dialogue, turn, duration, intent-share and entity-linking
metrics from the append-only turn log. Shares use all turns (user and
agent) as the denominator; a turn is one logged utterance by either side.
"""

from __future__ import annotations

import json
import statistics
from collections import Counter, defaultdict
from dataclasses import dataclass, field

FALLBACK_ACTION = "Clarify"
ENTITY_SEARCH_INTENT = "EntitySearch"
UNCLASSIFIED = "unclassified"


@dataclass
class LogReport:
    dialogues: int = 0
    total_turns: int = 0
    mean_turns_per_dialogue: float = 0.0
    duration_mean: float = 0.0
    duration_sd: float = 0.0
    duration_min: float = 0.0
    duration_max: float = 0.0
    intent_shares: dict[str, float] = field(default_factory=dict)  # percent
    unclassified_share: float = 0.0
    fallback_count: int = 0
    fallback_share: float = 0.0
    entity_requests: int = 0
    recognized_total: int = 0
    unrecognized_total: int = 0
    recognized_by_class: dict[str, int] = field(default_factory=dict)
    unrecognized_by_class: dict[str, int] = field(default_factory=dict)
    bad_lines: int = 0
    duplicate_lines: int = 0

    def class_accuracy(self, class_name: str) -> float:
        recognized = self.recognized_by_class.get(class_name, 0)
        requests = recognized + self.unrecognized_by_class.get(class_name, 0)
        return recognized / requests if requests else 0.0

    def as_dict(self) -> dict:
        return {
            "dialogues": self.dialogues,
            "total_turns": self.total_turns,
            "mean_turns_per_dialogue": self.mean_turns_per_dialogue,
            "duration_mean": self.duration_mean,
            "duration_sd": self.duration_sd,
            "duration_min": self.duration_min,
            "duration_max": self.duration_max,
            "intent_shares": dict(self.intent_shares),
            "unclassified_share": self.unclassified_share,
            "fallback_count": self.fallback_count,
            "fallback_share": self.fallback_share,
            "entity_requests": self.entity_requests,
            "recognized_total": self.recognized_total,
            "unrecognized_total": self.unrecognized_total,
            "recognized_by_class": dict(self.recognized_by_class),
            "unrecognized_by_class": dict(self.unrecognized_by_class),
            "bad_lines": self.bad_lines,
            "duplicate_lines": self.duplicate_lines,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "LogReport":
        return cls(**raw)


def analyze(log_path) -> LogReport:
    """Parse a JSON Lines turn log into a LogReport.

    Bad lines are counted and skipped; duplicate records (same session,
    timestamp, speaker and text) are dropped. Records are grouped by
    session and sorted by timestamp, so line order does not matter.
    """
    report = LogReport()
    sessions: dict[str, list[dict]] = defaultdict(list)
    seen: set[tuple] = set()
    with open(log_path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError:
                report.bad_lines += 1
                continue
            if not isinstance(record, dict) or not {"session_id", "timestamp", "speaker"} <= record.keys():
                report.bad_lines += 1
                continue
            key = (record["session_id"], record["timestamp"], record["speaker"], record.get("text", ""))
            if key in seen:
                report.duplicate_lines += 1
                continue
            seen.add(key)
            sessions[record["session_id"]].append(record)

    if not sessions:
        return report

    durations = []
    intent_counts: Counter = Counter()
    total_turns = 0
    for records in sessions.values():
        records.sort(key=lambda r: r["timestamp"])
        total_turns += len(records)
        durations.append(records[-1]["timestamp"] - records[0]["timestamp"])
        for record in records:
            if record["speaker"] == "user" and record.get("intent"):
                intent_counts[record["intent"]] += 1
            if record["speaker"] == "agent" and FALLBACK_ACTION in record.get("action_kinds", ()):
                report.fallback_count += 1
            if record["speaker"] == "user" and record.get("intent") == ENTITY_SEARCH_INTENT:
                report.entity_requests += 1
                linked = record.get("linked_entities") or []
                if linked:
                    report.recognized_total += 1
                    class_name = linked[0].get("class_id") or UNCLASSIFIED
                    report.recognized_by_class[class_name] = report.recognized_by_class.get(class_name, 0) + 1
                else:
                    report.unrecognized_total += 1
                    class_name = record.get("guess_class") or UNCLASSIFIED
                    report.unrecognized_by_class[class_name] = (
                        report.unrecognized_by_class.get(class_name, 0) + 1
                    )

    report.dialogues = len(sessions)
    report.total_turns = total_turns
    report.mean_turns_per_dialogue = total_turns / len(sessions)
    report.duration_mean = statistics.fmean(durations)
    report.duration_sd = statistics.pstdev(durations)
    report.duration_min = min(durations)
    report.duration_max = max(durations)
    report.intent_shares = {
        intent: count / total_turns * 100.0 for intent, count in sorted(intent_counts.items())
    }
    report.unclassified_share = (total_turns - sum(intent_counts.values())) / total_turns * 100.0
    report.fallback_share = report.fallback_count / total_turns * 100.0
    return report


def render_report(report: LogReport, fmt: str = "table") -> str:
    """Render as a human-readable table or one-line machine JSON."""
    if fmt in ("json-lines", "json"):
        return json.dumps(report.as_dict(), ensure_ascii=False)
    if fmt != "table":
        raise ValueError(f"unknown format: {fmt}")

    lines = []
    lines.append("CONVERSATION LOG REPORT")
    lines.append("(shares are % of all turns, user and agent combined)")
    lines.append("=" * 56)
    lines.append(f"Dialogues:                {report.dialogues}")
    lines.append(f"Total turns:              {report.total_turns}")
    lines.append(f"Mean turns per dialogue:  {report.mean_turns_per_dialogue:.1f}")
    lines.append(
        "Session duration:         "
        f"mean {report.duration_mean:.1f}s, sd {report.duration_sd:.1f}s, "
        f"min {report.duration_min:.1f}s, max {report.duration_max:.1f}s"
    )
    if report.bad_lines or report.duplicate_lines:
        lines.append(f"Skipped lines:            {report.bad_lines} bad, {report.duplicate_lines} duplicate")
    lines.append("")
    lines.append("Intent share")
    lines.append("-" * 56)
    for intent, share in sorted(report.intent_shares.items(), key=lambda kv: (-kv[1], kv[0])):
        lines.append(f"  {intent:<22} {share:5.1f}%")
    lines.append(f"  {'(unclassified)':<22} {report.unclassified_share:5.1f}%")
    lines.append(f"Fallback responses:       {report.fallback_count} ({report.fallback_share:.1f}%)")
    lines.append("")
    lines.append("Entity classes                     Count   Accuracy")
    lines.append("-" * 56)
    total_requests = report.entity_requests
    recognized_share = report.recognized_total / total_requests if total_requests else 0.0
    unrecognized_share = report.unrecognized_total / total_requests if total_requests else 0.0
    lines.append(f"Recognized entities                {report.recognized_total:>5}   {recognized_share:.2f}")
    for name, count in sorted(report.recognized_by_class.items(), key=lambda kv: (-kv[1], kv[0])):
        lines.append(f"  {name:<32} {count:>5}   {report.class_accuracy(name):.2f}")
    lines.append(f"Unrecognized entities              {report.unrecognized_total:>5}   {unrecognized_share:.2f}")
    for name, count in sorted(report.unrecognized_by_class.items(), key=lambda kv: (-kv[1], kv[0])):
        lines.append(f"  {name:<32} {count:>5}   {report.class_accuracy(name):.2f}")
    return "\n".join(lines)
