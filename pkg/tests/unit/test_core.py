"""
Unit tests for settings, logging and error wrapping
"""

import logging

import pytest
from pydantic import ValidationError

from oracle_rank.core.config import Settings
from oracle_rank.core.logging import StructuredFormatter, configure_logging, log_stage
from oracle_rank.deps.exceptions import (
    ConfigurationError,
    CorpusFormatError,
    PipelineStageError,
    SampleMismatchError,
)
from oracle_rank.deps.utils import parse_int_list, parse_int_range
from oracle_rank.schemas.pipeline import PipelineConfig
from oracle_rank.schemas.ranking import RankingMethod


@pytest.mark.unit
class TestSettings:
    def test_defaults(self, monkeypatch):
        monkeypatch.delenv("ORACLE_RANK_THREADS", raising=False)
        settings = Settings(_env_file=None)

        assert settings.threads == 1
        assert settings.iforest_num_trees == 100
        assert settings.default_seeds == list(range(10))

    def test_environment_override(self, monkeypatch):
        monkeypatch.setenv("ORACLE_RANK_THREADS", "4")
        monkeypatch.setenv("ORACLE_RANK_RANKING_REPEATS", "3")

        settings = Settings(_env_file=None)

        assert settings.threads == 4
        assert settings.default_seeds == [0, 1, 2]

    def test_invalid_log_format(self):
        with pytest.raises(ValidationError):
            Settings(_env_file=None, log_format="xml")

    @pytest.mark.parametrize("exact_max_n", [-1, 61])
    def test_exact_wilcoxon_bound(self, exact_max_n):
        with pytest.raises(ValidationError):
            Settings(_env_file=None, exact_wilcoxon_max_n=exact_max_n)


@pytest.mark.unit
class TestPipelineConfig:
    def test_k_values_sorted_and_deduplicated(self, tmp_path):
        config = PipelineConfig(
            records_path=tmp_path, outcomes_path=tmp_path, out_dir=tmp_path, k_values=[5, 1, 5], seeds=[1]
        )

        assert config.k_values == [1, 5]

    @pytest.mark.parametrize("k_values", [[], [0, 1], [-3]])
    def test_invalid_k_values(self, tmp_path, k_values):
        with pytest.raises(ValidationError):
            PipelineConfig(
                records_path=tmp_path, outcomes_path=tmp_path, out_dir=tmp_path, k_values=k_values, seeds=[1]
            )

    def test_seeds_required_when_ranking(self, tmp_path):
        with pytest.raises(ValidationError):
            PipelineConfig(records_path=tmp_path, outcomes_path=tmp_path, out_dir=tmp_path, seeds=[])

    def test_no_seeds_without_ranking(self, tmp_path):
        config = PipelineConfig(
            records_path=tmp_path, outcomes_path=tmp_path, out_dir=tmp_path, ranking=RankingMethod.NONE
        )

        assert "records_path" not in config.describe()
        assert config.describe()["ranking"] == "none"


@pytest.mark.unit
class TestParsing:
    def test_int_list(self):
        assert parse_int_list("1, 3,5") == [1, 3, 5]

    @pytest.mark.parametrize("value", ["", "1,,2", "a,b", "1.5"])
    def test_bad_int_list(self, value):
        with pytest.raises(ValueError):
            parse_int_list(value)

    def test_int_range(self):
        assert parse_int_range("7") == (7, 7)
        assert parse_int_range("1-3") == (1, 3)

    def test_bad_int_range(self):
        with pytest.raises(ValueError):
            parse_int_range("1..3")


@pytest.mark.unit
class TestLogStage:
    """Stage timing and error wrapping"""

    def test_completion_is_logged(self, caplog):
        with caplog.at_level(logging.INFO, logger="oracle_rank.core.logging"):
            with log_stage("ingest", "cid-1"):
                pass

        record = next(r for r in caplog.records if r.getMessage() == "Stage ingest completed")
        assert record.stage == "ingest"
        assert record.correlation_id == "cid-1"
        assert record.process_time_ms >= 0

    def test_domain_error_is_wrapped_with_codes(self):
        with pytest.raises(PipelineStageError) as exc_info:
            with log_stage("ingest"):
                raise CorpusFormatError("records.jsonl", 4, "bad json")

        error = exc_info.value
        assert error.stage == "ingest"
        assert error.error_code == "MALFORMED_LINE"
        assert error.exit_code == 2
        assert "records.jsonl:4" in error.message

    def test_usage_error_keeps_exit_code(self):
        with pytest.raises(PipelineStageError) as exc_info:
            with log_stage("rank"):
                raise ConfigurationError("ranking method required")

        assert exc_info.value.exit_code == 1

    def test_os_error_is_io_error(self):
        with pytest.raises(PipelineStageError) as exc_info:
            with log_stage("ingest"):
                raise FileNotFoundError("records.jsonl")

        assert exc_info.value.error_code == "IO_ERROR"
        assert exc_info.value.exit_code == 2

    def test_nested_stage_errors_are_not_rewrapped(self):
        with pytest.raises(PipelineStageError) as exc_info:
            with log_stage("outer"):
                with log_stage("inner"):
                    raise SampleMismatchError("lengths differ")

        assert exc_info.value.stage == "inner"

    def test_unexpected_errors_are_wrapped_as_data_errors(self):
        with pytest.raises(PipelineStageError) as exc_info:
            with log_stage("metrics"):
                raise KeyError("x")

        assert exc_info.value.stage == "metrics"
        assert exc_info.value.error_code == "DATA_ERROR"
        assert exc_info.value.exit_code == 2
        assert isinstance(exc_info.value.cause, KeyError)


@pytest.mark.unit
class TestStructuredFormatter:
    def test_appends_extra_fields(self):
        formatter = StructuredFormatter("%(message)s")
        record = logging.LogRecord("x", logging.INFO, __file__, 1, "done", None, None)
        record.stage = "rank"
        record.count = 3

        assert formatter.format(record) == "done | stage=rank count=3"

    def test_plain_message_without_extras(self):
        record = logging.LogRecord("x", logging.INFO, __file__, 1, "done", None, None)

        assert StructuredFormatter("%(message)s").format(record) == "done"

    def test_configure_structured(self):
        configure_logging("DEBUG", "structured")

        root = logging.getLogger()
        assert root.level == logging.DEBUG
        assert any(isinstance(h.formatter, StructuredFormatter) for h in root.handlers)
        configure_logging("INFO", "text")
