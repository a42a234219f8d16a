"""
Test configuration and fixtures
"""

import logging

import pytest
from click.testing import CliRunner

from oracle_rank.schemas.corpus import OracleKind, PrefixProvenance
from oracle_rank.schemas.synthetic import SyntheticSpec
from oracle_rank.services.synthetic import generate_synthetic_corpus
from tests.utils.builders import assertion_trace, make_entry, make_trace, write_corpus_files


@pytest.fixture
def runner():
    """Click test runner."""
    return CliRunner()


@pytest.fixture
def small_entries():
    """Two bugs, one run: Bug-1 has a TP among its failures, Bug-2 only FPs, TNs and an FN."""
    return [
        make_entry("b1-t0", "FP", raw_trace=assertion_trace(), bug_id="Bug-1"),
        make_entry(
            "b1-t1",
            "TP",
            raw_trace=make_trace("java.lang.ArithmeticException", "/ by zero"),
            bug_id="Bug-1",
            oracle_kind=OracleKind.EXPECT_NO_EXCEPTION,
            focal_method_name="divide",
        ),
        make_entry("b1-t2", "TN", bug_id="Bug-1"),
        make_entry("b1-t3", "FP", raw_trace=assertion_trace("expected:<0> but was:<3>"), bug_id="Bug-1"),
        make_entry("b2-t0", "FP", raw_trace=assertion_trace(), bug_id="Bug-2"),
        make_entry("b2-t1", "TN", bug_id="Bug-2"),
        make_entry("b2-t2", "FN", bug_id="Bug-2", fixed_trace=assertion_trace()),
        make_entry(
            "b2-t3",
            "TP",
            raw_trace=make_trace("java.lang.NullPointerException", None),
            bug_id="Bug-2",
            provenance=PrefixProvenance.FIXED,
            oracle_kind=OracleKind.EXPECT_NO_EXCEPTION,
        ),
    ]


@pytest.fixture
def small_corpus_files(tmp_path, small_entries):
    """records.jsonl and outcomes.jsonl of small_entries."""
    return write_corpus_files(tmp_path, small_entries)


@pytest.fixture
def synthetic_spec():
    return SyntheticSpec(
        bugs=4,
        failed_min=12,
        failed_max=16,
        tp_min=1,
        tp_max=2,
        passed_per_bug=3,
        fn_per_bug=1,
        compile_errors_per_bug=1,
        runs=2,
    )


@pytest.fixture
def synthetic_dir(tmp_path, synthetic_spec):
    """Directory holding a generated synthetic corpus."""
    out_dir = tmp_path / "corpus"
    generate_synthetic_corpus(synthetic_spec, seed=7, out_dir=out_dir)
    return out_dir


@pytest.fixture(autouse=True)
def drop_cli_log_handlers():
    """Remove root handlers installed by configure_logging during a test."""
    yield
    root = logging.getLogger()
    for handler in list(root.handlers):
        if type(handler) is logging.StreamHandler:
            root.removeHandler(handler)
