"""Corpus replay and grading: load commands, rerun them, judge the traces."""

from .corpus import TASKS, CorpusCase, MalformedRecord, default_corpus, dump_corpus, load_corpus
from .oracles import DEFAULT_SPEED, GradeResult, ORACLES, grade
from .replay import AttemptOutcome, CaseOutcome, replay_case, run_replay, summarize
from .report import (
    BiteStats,
    bite_stats_from_times,
    bite_stats_from_trace,
    format_bite_stats,
    pooled_bite_stats,
    render_text_report,
    write_report,
)

__all__ = [
    "TASKS",
    "CorpusCase",
    "MalformedRecord",
    "default_corpus",
    "dump_corpus",
    "load_corpus",
    "DEFAULT_SPEED",
    "GradeResult",
    "ORACLES",
    "grade",
    "AttemptOutcome",
    "CaseOutcome",
    "replay_case",
    "run_replay",
    "summarize",
    "BiteStats",
    "bite_stats_from_times",
    "bite_stats_from_trace",
    "format_bite_stats",
    "pooled_bite_stats",
    "render_text_report",
    "write_report",
]
