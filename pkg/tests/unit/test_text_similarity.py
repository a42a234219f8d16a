"""
Unit tests for tokenization and TF-IDF cosine similarity
"""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracle_rank.services.text_similarity import TextSimilarityService, tfidf_cosine

# hand computation: idf(df=1) = ln(3/2) + 1, idf(df=2) = 1; dot = 3
PINNED_SIMILARITY = 0.465646


@pytest.mark.unit
class TestTokenize:
    @pytest.fixture
    def service(self):
        return TextSimilarityService()

    def test_camel_case_and_punctuation(self, service):
        assert service.tokenize("assertEquals(foo.getValue(), 3);") == ["assert", "equals", "foo", "get", "value", "3"]

    def test_acronyms(self, service):
        assert service.tokenize("parseHTTPHeader") == ["parse", "http", "header"]

    def test_empty(self, service):
        assert service.tokenize("") == []
        assert service.tokenize("  ;; ") == []


@pytest.mark.unit
class TestTfidfCosine:
    def test_pinned_value(self):
        """Regression constant for the smoothed-idf, l2-normalised weighting"""
        assert tfidf_cosine("getValue returns value", "returns the stored value") == pytest.approx(
            PINNED_SIMILARITY, abs=1e-4
        )

    def test_identical_texts(self):
        assert tfidf_cosine("Returns the value", "returns the VALUE") == pytest.approx(1.0)

    def test_disjoint_texts(self):
        assert tfidf_cosine("alpha beta", "gamma delta") == 0.0

    def test_empty_side_is_zero(self):
        assert tfidf_cosine("", "returns the value") == 0.0
        assert tfidf_cosine("foo", "") == 0.0
        assert tfidf_cosine("()", "{}") == 0.0

    @settings(max_examples=100, deadline=None)
    @given(
        a=st.text(alphabet="abcXYZ _.(", max_size=30),
        b=st.text(alphabet="abcXYZ _.(", max_size=30),
    )
    def test_symmetric_and_bounded(self, a, b):
        value = tfidf_cosine(a, b)

        assert 0.0 <= value <= 1.0
        assert value == pytest.approx(tfidf_cosine(b, a))
