"""
Deterministic synthetic corpora with planted bug-finding tests

Each (bug, run) gets a block of failed-on-buggy tests. Most are homogeneous
false positives: the same few code lines, a handful of common focal methods
and assertion failures. The planted true positives stand out the way real
bug-finding tests tend to: a trace exception no other test of the bug raises,
code lines of their own, a focal method no false positive targets and text
that echoes the focal docstring.
"""

import logging
from pathlib import Path
from typing import Dict, List, Tuple, Union

import numpy as np

from oracle_rank.schemas.corpus import (
    Corpus,
    CorpusEntry,
    ExecutionOutcome,
    ExecutionResult,
    OracleKind,
    PrefixProvenance,
    TestRecord,
)
from oracle_rank.schemas.synthetic import SyntheticSpec
from oracle_rank.services.corpus import CorpusService

logger = logging.getLogger(__name__)

RECORDS_FILE = "records.jsonl"
OUTCOMES_FILE = "outcomes.jsonl"
TRUTH_FILE = "truth.tsv"

PACKAGE = "org.synth"
CLASS_NAMES = ["Widget", "Ledger", "Matrix", "Parser", "Buffer", "Router", "Schedule", "Catalog"]

# focal methods shared by the false positives of every bug
COMMON_METHODS = [
    ("getValue", "Returns the current value.", "public int getValue() { return value; }"),
    ("setValue", "Sets the current value.", "public void setValue(int v) { value = v; }"),
    ("size", "Returns the number of stored items.", "public int size() { return items.length; }"),
    ("isEmpty", "Tells whether no items are stored.", "public boolean isEmpty() { return size() == 0; }"),
]

# (verb, noun) pairs naming focal methods targeted only by planted tests
PLANTED_METHODS = [
    ("compute", "checksum"),
    ("merge", "segments"),
    ("normalize", "weights"),
    ("resolve", "alias"),
    ("rotate", "buffer"),
    ("compact", "journal"),
    ("expand", "range"),
    ("reconcile", "balance"),
    ("split", "interval"),
    ("encode", "header"),
    ("rebalance", "tree"),
    ("truncate", "history"),
]

RARE_EXCEPTIONS = [
    "java.lang.IllegalStateException",
    "java.lang.ArithmeticException",
    "java.lang.ClassCastException",
    "java.lang.ArrayIndexOutOfBoundsException",
    "java.lang.NumberFormatException",
    "java.lang.UnsupportedOperationException",
    "java.util.ConcurrentModificationException",
    "java.lang.NegativeArraySizeException",
    "java.lang.StringIndexOutOfBoundsException",
    "java.lang.IllegalMonitorStateException",
    "java.util.EmptyStackException",
    "java.util.NoSuchElementException",
]

ASSERTION_EXCEPTION = "junit.framework.AssertionFailedError"
NULL_POINTER_EXCEPTION = "java.lang.NullPointerException"
NULL_POINTER_SHARE = 0.15

# optional prefix lines of non-planted tests; VAR is the object under test, {n} a small literal
SHARED_LINE_TEMPLATES = [
    "VAR.setValue({n});",
    "int int0 = VAR.size();",
    "VAR.add({n});",
    "boolean boolean0 = VAR.isEmpty();",
    "VAR.remove({n});",
    "int int1 = VAR.getValue();",
]
SHARED_LINE_SHARE = 0.6
SHARED_LITERALS = 5


class _BugContext:
    """Names shared by every test of one bug"""

    def __init__(self, bug_index: int):
        self.bug_id = f"Synth-{bug_index + 1}"
        self.class_name = f"{CLASS_NAMES[bug_index % len(CLASS_NAMES)]}{bug_index + 1}"
        self.variable = f"{CLASS_NAMES[bug_index % len(CLASS_NAMES)].lower()}0"
        self.constructor_line = f"{self.class_name} {self.variable} = new {self.class_name}();"
        self.line_templates = [t.replace("VAR", self.variable) for t in SHARED_LINE_TEMPLATES]

    def test_name(self, index: int) -> str:
        return f"{PACKAGE}.{self.class_name}_ESTest.test{index:02d}"

    def frames(self, method: str, line: int) -> List[str]:
        return [
            f"\tat {PACKAGE}.{self.class_name}.{method}({self.class_name}.java:{line})",
            f"\tat {PACKAGE}.{self.class_name}_ESTest.test({self.class_name}_ESTest.java:{line + 20})",
        ]

    def trace(self, index: int, exception_line: str, method: str, line: int) -> str:
        return "\n".join([self.test_name(index), exception_line, *self.frames(method, line)])


def _rare_exception(slot: int) -> str:
    if slot < len(RARE_EXCEPTIONS):
        return RARE_EXCEPTIONS[slot]
    return f"{PACKAGE}.Planted{slot}Exception"


def _planted_method(slot: int) -> Tuple[str, str, str]:
    verb, noun = PLANTED_METHODS[slot % len(PLANTED_METHODS)]
    suffix = "" if slot < len(PLANTED_METHODS) else str(slot // len(PLANTED_METHODS))
    name = f"{verb}{noun.capitalize()}{suffix}"
    docstring = f"{verb.capitalize()} the {noun} of this object and return the {noun}."
    source = f"public long {name}() {{ long acc = 0; for (int v : values) acc += v; return acc; }}"
    return name, docstring, source


class _Builder:
    def __init__(self, spec: SyntheticSpec, rng: np.random.Generator):
        self.spec = spec
        self.rng = rng
        self.entries: List[CorpusEntry] = []
        self.truth: Dict[str, bool] = {}

    def _provenance(self) -> PrefixProvenance:
        if self.rng.random() < self.spec.fixed_fraction:
            return PrefixProvenance.FIXED
        return PrefixProvenance.BUGGY

    def _shared_prefix(self, ctx: _BugContext) -> str:
        lines = [ctx.constructor_line]
        for template in ctx.line_templates:
            include = self.rng.random() < SHARED_LINE_SHARE
            literal = int(self.rng.integers(SHARED_LITERALS))
            if include:
                lines.append(template.format(n=literal))
        return "\n".join(lines)

    def _add(self, record: TestRecord, outcome: ExecutionOutcome, is_tp: bool) -> None:
        self.entries.append(CorpusEntry(record=record, outcome=outcome))
        self.truth[record.record_id] = is_tp

    def _false_positive(self, ctx: _BugContext, run: int, record_id: str, index: int) -> None:
        method_index = int(self.rng.integers(len(COMMON_METHODS)))
        method, docstring, source = COMMON_METHODS[method_index]
        expected, actual = (int(v) for v in self.rng.integers(0, 3, size=2))
        if self.rng.random() < NULL_POINTER_SHARE:
            exception_line = NULL_POINTER_EXCEPTION
        else:
            exception_line = f"{ASSERTION_EXCEPTION}: expected:<{expected}> but was:<{actual}>"
        trace = ctx.trace(index, exception_line, method, 40 + method_index)
        record = TestRecord(
            record_id=record_id,
            bug_id=ctx.bug_id,
            run_id=run,
            prefix_source=self._shared_prefix(ctx),
            oracle_kind=OracleKind.ASSERTION,
            oracle_text=f"assertEquals({expected}, int0);",
            focal_method_name=method,
            focal_method_source=source,
            focal_docstring=docstring,
            prefix_provenance=self._provenance(),
        )
        outcome = ExecutionOutcome(
            record_id=record_id,
            buggy_result=ExecutionResult.FAIL,
            fixed_result=ExecutionResult.FAIL,
            raw_trace=trace,
            fixed_trace=trace,
        )
        self._add(record, outcome, False)

    def _true_positive(self, ctx: _BugContext, run: int, record_id: str, index: int, slot: int) -> None:
        method, docstring, source = _planted_method(slot)
        verb, noun = PLANTED_METHODS[slot % len(PLANTED_METHODS)]
        lines = [ctx.constructor_line]
        for j in range(self.spec.distinct_lines):
            value = int(self.rng.integers(1, 1000))
            lines.append(f"long {noun}{index}_{j} = {ctx.variable}.{method}({value});")
        if self.spec.doc_similarity:
            lines.append(f"// {verb} the {noun} and return the {noun}")
        lines.append(f"{ctx.variable}.{method}();")
        exception = _rare_exception(slot)
        message = f"{noun} {int(self.rng.integers(1, 10000))} out of state"
        record = TestRecord(
            record_id=record_id,
            bug_id=ctx.bug_id,
            run_id=run,
            prefix_source="\n".join(lines),
            oracle_kind=OracleKind.EXPECT_NO_EXCEPTION,
            oracle_text=None,
            focal_method_name=method,
            focal_method_source=source,
            focal_docstring=docstring,
            prefix_provenance=self._provenance(),
        )
        outcome = ExecutionOutcome(
            record_id=record_id,
            buggy_result=ExecutionResult.FAIL,
            fixed_result=ExecutionResult.PASS,
            raw_trace=ctx.trace(index, f"{exception}: {message}", method, 80 + slot),
        )
        self._add(record, outcome, True)

    def _passing(self, ctx: _BugContext, run: int, record_id: str, index: int, fails_on_fixed: bool) -> None:
        method, docstring, source = COMMON_METHODS[int(self.rng.integers(len(COMMON_METHODS)))]
        record = TestRecord(
            record_id=record_id,
            bug_id=ctx.bug_id,
            run_id=run,
            prefix_source=self._shared_prefix(ctx),
            oracle_kind=OracleKind.ASSERTION,
            oracle_text=f"assertEquals({int(self.rng.integers(0, 3))}, int1);",
            focal_method_name=method,
            focal_method_source=source,
            focal_docstring=docstring,
            prefix_provenance=self._provenance(),
        )
        fixed_trace = None
        if fails_on_fixed:
            fixed_trace = ctx.trace(index, f"{ASSERTION_EXCEPTION}: expected:<0> but was:<1>", method, 60)
        outcome = ExecutionOutcome(
            record_id=record_id,
            buggy_result=ExecutionResult.PASS,
            fixed_result=ExecutionResult.FAIL if fails_on_fixed else ExecutionResult.PASS,
            fixed_trace=fixed_trace,
        )
        self._add(record, outcome, False)

    def _compile_error(self, ctx: _BugContext, run: int, record_id: str) -> None:
        record = TestRecord(
            record_id=record_id,
            bug_id=ctx.bug_id,
            run_id=run,
            prefix_source=f"{ctx.constructor_line}\n{ctx.variable}.undefinedMethod();",
            oracle_kind=OracleKind.ASSERTION,
            oracle_text="assertTrue(boolean0);",
            focal_method_name="undefinedMethod",
            prefix_provenance=self._provenance(),
        )
        outcome = ExecutionOutcome(
            record_id=record_id,
            buggy_result=ExecutionResult.FAIL,
            fixed_result=ExecutionResult.FAIL,
            compile_error=True,
        )
        self._add(record, outcome, False)

    def add_bug_run(self, ctx: _BugContext, run: int) -> None:
        spec = self.spec
        # Draw the failed-set size and the positions of the planted TPs
        n_failed = int(self.rng.integers(spec.failed_min, spec.failed_max + 1))
        n_tp = int(self.rng.integers(spec.tp_min, spec.tp_max + 1))
        tp_positions = set(int(i) for i in self.rng.choice(n_failed, n_tp, replace=False)) if n_tp else set()

        index = 0

        def next_id() -> Tuple[str, int]:
            nonlocal index
            record_id = f"{ctx.bug_id}-r{run}-t{index:03d}"
            index += 1
            return record_id, index - 1

        # Failed tests first, then passing, FN and compile-error tests
        slot = 0
        for position in range(n_failed):
            record_id, i = next_id()
            if position in tp_positions:
                self._true_positive(ctx, run, record_id, i, slot)
                slot += 1
            else:
                self._false_positive(ctx, run, record_id, i)
        for _ in range(spec.passed_per_bug):
            record_id, i = next_id()
            self._passing(ctx, run, record_id, i, fails_on_fixed=False)
        for _ in range(spec.fn_per_bug):
            record_id, i = next_id()
            self._passing(ctx, run, record_id, i, fails_on_fixed=True)
        for _ in range(spec.compile_errors_per_bug):
            record_id, _ = next_id()
            self._compile_error(ctx, run, record_id)


class SyntheticCorpusService:
    """
    Builds synthetic corpora and writes them in the ingest format
    """

    def __init__(self):
        self.corpus_service = CorpusService()

    def build(self, spec: SyntheticSpec, seed: int) -> Tuple[Corpus, Dict[str, bool]]:
        """
        Build a synthetic corpus in memory

        Args:
            spec: Corpus shape
            seed: Seed of the numpy generator

        Returns:
            The corpus and the truth map record_id -> is planted TP
        """
        # Bugs outer, runs inner; record ids follow that order
        builder = _Builder(spec, np.random.default_rng(seed))
        for bug_index in range(spec.bugs):
            ctx = _BugContext(bug_index)
            for run in range(spec.runs):
                builder.add_bug_run(ctx, run)
        return tuple(builder.entries), builder.truth

    def generate(self, spec: SyntheticSpec, seed: int, out_dir: Union[str, Path]) -> Corpus:
        """
        Write a synthetic corpus: records, outcomes and the truth sidecar

        Output is a pure function of (spec, seed).

        Args:
            spec: Corpus shape
            seed: Generator seed
            out_dir: Directory receiving records.jsonl, outcomes.jsonl and truth.tsv

        Returns:
            The generated corpus
        """
        out_path = Path(out_dir)
        out_path.mkdir(parents=True, exist_ok=True)
        corpus, truth = self.build(spec, seed)

        # Records and outcomes, then the truth sidecar in corpus order
        self.corpus_service.write(corpus, out_path / RECORDS_FILE, out_path / OUTCOMES_FILE)
        with open(out_path / TRUTH_FILE, "w", encoding="utf-8", newline="\n") as handle:
            for entry in corpus:
                handle.write(f"{entry.record_id}\t{int(truth[entry.record_id])}\n")

        logger.info(
            f"Generated synthetic corpus with {spec.bugs} bugs into {out_path}",
            extra={"event_type": "gen", "count": len(corpus)},
        )
        return corpus


synthetic_corpus_service = SyntheticCorpusService()


def generate_synthetic_corpus(spec: SyntheticSpec, seed: int, out_dir: Union[str, Path]) -> Corpus:
    return synthetic_corpus_service.generate(spec, seed, out_dir)
