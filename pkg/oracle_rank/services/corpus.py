"""
Corpus ingestion, deduplication and filtering
"""

import logging
from collections import Counter
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Tuple, Type, TypeVar, Union

from pydantic import BaseModel, ValidationError

from oracle_rank.deps.exceptions import (
    CorpusFormatError,
    DanglingRecordError,
    DuplicateRecordError,
)
from oracle_rank.schemas.corpus import (
    Corpus,
    CorpusEntry,
    ExecutionOutcome,
    PrefixProvenance,
    TestRecord,
)
from oracle_rank.schemas.pipeline import ProvenanceFilter

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
ModelT = TypeVar("ModelT", bound=BaseModel)


class CorpusService:
    """
    Reads, joins, deduplicates and filters corpora of generated tests
    """

    def ingest(self, records_path: PathLike, outcomes_path: PathLike) -> Corpus:
        """
        Read and join the records and outcomes files

        Args:
            records_path: Line-delimited TestRecord objects
            outcomes_path: Line-delimited ExecutionOutcome objects

        Returns:
            Joined entries in records-file order

        Raises:
            CorpusFormatError: malformed line (with its line number)
            DuplicateRecordError: a record_id repeated within one file
            DanglingRecordError: ids present on only one side of the join
        """
        records = self._read_jsonl(records_path, TestRecord)
        outcomes = self._read_jsonl(outcomes_path, ExecutionOutcome)

        # record ids are unique within each file
        duplicate_records = self._duplicates(r.record_id for r in records)
        if duplicate_records:
            raise DuplicateRecordError(str(records_path), duplicate_records)
        duplicate_outcomes = self._duplicates(o.record_id for o in outcomes)
        if duplicate_outcomes:
            raise DuplicateRecordError(str(outcomes_path), duplicate_outcomes)

        # every record joins exactly one outcome and the other way round
        outcome_by_id: Dict[str, ExecutionOutcome] = {o.record_id: o for o in outcomes}
        record_ids = {r.record_id for r in records}
        missing_outcomes = [r.record_id for r in records if r.record_id not in outcome_by_id]
        missing_records = [o.record_id for o in outcomes if o.record_id not in record_ids]
        if missing_outcomes or missing_records:
            raise DanglingRecordError(missing_records, missing_outcomes)

        corpus = tuple(CorpusEntry(record=r, outcome=outcome_by_id[r.record_id]) for r in records)
        logger.info(
            f"Ingested {len(corpus)} entries from {records_path}",
            extra={"event_type": "ingest", "count": len(corpus)},
        )
        return corpus

    def write(self, corpus: Corpus, records_path: PathLike, outcomes_path: PathLike) -> None:
        """Write a corpus back in the line-delimited external schema"""
        with open(records_path, "w", encoding="utf-8", newline="\n") as records_file, open(
            outcomes_path, "w", encoding="utf-8", newline="\n"
        ) as outcomes_file:
            for entry in corpus:
                records_file.write(entry.record.model_dump_json(exclude_none=True) + "\n")
                outcomes_file.write(entry.outcome.model_dump_json(exclude_none=True) + "\n")

    def deduplicate(self, corpus: Corpus) -> Corpus:
        """
        Drop exact duplicates, keeping the first occurrence

        Two entries are duplicates when bug, run and the whitespace-normalised
        prefix plus oracle text are equal.
        """
        # First occurrence wins
        seen = set()
        survivors = []
        for entry in corpus:
            key = entry.record.duplicate_key()
            if key in seen:
                continue
            seen.add(key)
            survivors.append(entry)

        removed = len(corpus) - len(survivors)
        if removed:
            logger.info(f"Removed {removed} duplicate test cases", extra={"event_type": "dedup", "count": removed})
        return tuple(survivors)

    def filter_records(self, corpus: Corpus) -> Corpus:
        """Drop the compile-error entries and nothing else"""
        kept = tuple(entry for entry in corpus if not entry.outcome.compile_error)
        removed = len(corpus) - len(kept)
        if removed:
            logger.info(
                f"Filtered {removed} compile-error test cases",
                extra={"event_type": "filter", "count": removed},
            )
        return kept

    def filter_provenance(self, corpus: Corpus, mode: ProvenanceFilter) -> Corpus:
        """
        Keep the records whose prefix provenance matches the filter

        Args:
            corpus: Corpus to filter
            mode: buggy, fixed or all
        """
        if mode == ProvenanceFilter.ALL:
            return tuple(corpus)
        # Map the filter mode onto a provenance value
        wanted = PrefixProvenance.BUGGY if mode == ProvenanceFilter.BUGGY else PrefixProvenance.FIXED
        return tuple(entry for entry in corpus if entry.record.prefix_provenance == wanted)

    def bug_universe(self, corpus: Corpus) -> List[str]:
        """Distinct bug ids in first-seen order"""
        return list(dict.fromkeys(entry.bug_id for entry in corpus))

    def run_ids(self, corpus: Corpus) -> List[int]:
        return sorted({entry.run_id for entry in corpus})

    def group_by_bug_run(self, corpus: Corpus) -> Dict[Tuple[str, int], List[CorpusEntry]]:
        """Group entries by (bug_id, run_id), keeping corpus order inside and across groups"""
        groups: Dict[Tuple[str, int], List[CorpusEntry]] = {}
        for entry in corpus:
            groups.setdefault((entry.bug_id, entry.run_id), []).append(entry)
        return groups

    def read_truth(self, path: PathLike) -> Dict[str, bool]:
        """
        Read a truth sidecar of record_id<TAB>is_tp lines

        Raises:
            CorpusFormatError: on lines without two fields or with is_tp outside {0,1}
        """
        truth: Dict[str, bool] = {}
        for line_number, line in self._numbered_lines(path):
            parts = line.split("\t")
            if len(parts) != 2 or parts[1] not in ("0", "1"):
                raise CorpusFormatError(str(path), line_number, "expected record_id<TAB>0|1")
            truth[parts[0]] = parts[1] == "1"
        return truth

    def _read_jsonl(self, path: PathLike, model: Type[ModelT]) -> List[ModelT]:
        """
        Parse a line-delimited JSON file into models, skipping blank lines

        Raises:
            CorpusFormatError: on the first line that is not a valid object of the model
        """
        items: List[ModelT] = []
        for line_number, line in self._numbered_lines(path):
            try:
                items.append(model.model_validate_json(line))
            except ValidationError as e:
                # report the first failing field only
                first = e.errors()[0]
                location = ".".join(str(part) for part in first.get("loc", ())) or "line"
                raise CorpusFormatError(str(path), line_number, f"{location}: {first['msg']}") from e
        return items

    @staticmethod
    def _duplicates(ids: Iterable[str]) -> List[str]:
        counts = Counter(ids)
        return [record_id for record_id, count in counts.items() if count > 1]

    @staticmethod
    def _numbered_lines(path: PathLike) -> Iterator[Tuple[int, str]]:
        with open(path, "r", encoding="utf-8") as handle:
            for line_number, line in enumerate(handle, start=1):
                line = line.rstrip("\n")
                if line.strip():
                    yield line_number, line


corpus_service = CorpusService()


def ingest_corpus(records_path: PathLike, outcomes_path: PathLike) -> Corpus:
    return corpus_service.ingest(records_path, outcomes_path)


def deduplicate(corpus: Corpus) -> Corpus:
    return corpus_service.deduplicate(corpus)


def filter_records(corpus: Corpus) -> Corpus:
    return corpus_service.filter_records(corpus)
