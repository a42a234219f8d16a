"""
Stack trace and source scan schemas
"""

from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field


class ParsedTrace(BaseModel):
    """Structured JVM-style stack trace; only the outermost exception fills the exception fields"""

    model_config = ConfigDict(frozen=True)

    test_qualified_name: str
    exception_qualified_name: str
    exception_simple_name: str
    message: Optional[str] = None
    frames: List[str] = Field(default_factory=list, description="'at ...' lines of the outermost section")
    causes: List[str] = Field(default_factory=list, description="'Caused by:' lines, in order")
    other_lines: List[str] = Field(default_factory=list, description="Remaining outermost lines, verbatim")


class PrefixScan(BaseModel):
    """Result of the lexical scan of a test prefix"""

    model_config = ConfigDict(frozen=True)

    has_catch: bool
    diagnostics: List[str] = Field(default_factory=list)
