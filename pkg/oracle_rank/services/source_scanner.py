"""
Lexical scan of test prefixes for catch clauses
"""

import logging
from typing import List, Tuple

from oracle_rank.schemas.trace import PrefixScan

logger = logging.getLogger(__name__)

CATCH_KEYWORD = "catch"
TEXT_BLOCK = '"""'


class PrefixScannerService:
    """
    Finds ``catch`` keywords in Java-like source without a grammar parse
    """

    def scan(self, source: str) -> PrefixScan:
        """
        Scan source for a ``catch`` keyword outside literals and comments

        Tracks string, char, text-block and comment state. ``catch`` only
        counts as a whole identifier. Unterminated literals and comments run to
        the end of the input and are reported in the diagnostics.

        Args:
            source: Test prefix source text

        Returns:
            PrefixScan with the verdict and diagnostics
        """
        source = source or ""
        diagnostics: List[str] = []
        has_catch = False
        i = 0
        n = len(source)
        while i < n:
            c = source[i]
            if source.startswith("//", i):
                # line comment
                newline = source.find("\n", i)
                i = n if newline < 0 else newline + 1
            elif source.startswith("/*", i):
                # block comment
                end = source.find("*/", i + 2)
                if end < 0:
                    diagnostics.append(f"unterminated block comment at offset {i}")
                    i = n
                else:
                    i = end + 2
            elif source.startswith(TEXT_BLOCK, i):
                i, closed = self._skip_quoted(source, i, TEXT_BLOCK)
                if not closed:
                    diagnostics.append("unterminated text block")
            elif c in "\"'":
                # string or char literal
                start = i
                i, closed = self._skip_quoted(source, i, c)
                if not closed:
                    kind = "string" if c == '"' else "char"
                    diagnostics.append(f"unterminated {kind} literal at offset {start}")
            elif self._is_identifier_char(c):
                end = i
                while end < n and self._is_identifier_char(source[end]):
                    end += 1
                # digits start number literals, never identifiers
                if not c.isdigit() and source[i:end] == CATCH_KEYWORD:
                    has_catch = True
                i = end
            else:
                i += 1

        return PrefixScan(has_catch=has_catch, diagnostics=diagnostics)

    def has_catch(self, prefix_source: str) -> bool:
        """True iff the prefix contains a catch clause"""
        scan = self.scan(prefix_source)
        for note in scan.diagnostics:
            logger.debug(f"Prefix scan: {note}")
        return scan.has_catch

    @staticmethod
    def _is_identifier_char(c: str) -> bool:
        return c.isalnum() or c in "_$"

    @staticmethod
    def _skip_quoted(source: str, start: int, quote: str) -> Tuple[int, bool]:
        """
        Skip a string or char literal starting at ``start`` (the opening quote)

        Returns:
            Index just past the closing quote and whether the literal was terminated
        """
        i = start + len(quote)
        n = len(source)
        while i < n:
            if source[i] == "\\":
                i += 2
                continue
            if source.startswith(quote, i):
                return i + len(quote), True
            i += 1
        return n, False


prefix_scanner_service = PrefixScannerService()


def prefix_has_catch(prefix_source: str) -> bool:
    return prefix_scanner_service.has_catch(prefix_source)
