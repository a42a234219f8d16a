"""
TF-IDF cosine similarity between a test case and a focal docstring
"""

import re
from typing import List

from sklearn.feature_extraction.text import TfidfVectorizer
from sklearn.metrics.pairwise import cosine_similarity

_CAMEL_LOWER_UPPER = re.compile(r"([a-z0-9])([A-Z])")
_CAMEL_ACRONYM = re.compile(r"([A-Z]+)([A-Z][a-z])")
_NON_ALNUM = re.compile(r"[^0-9A-Za-z]+")


class TextSimilarityService:
    """
    Scores how close a test's text is to its focal method's docstring
    """

    def tokenize(self, text: str) -> List[str]:
        """
        Split source or prose into lowercase word tokens

        camelCase and acronym boundaries split ("parseHTTPHeader" -> parse,
        http, header), as does every non-alphanumeric character.
        """
        if not text:
            return []
        text = _CAMEL_LOWER_UPPER.sub(r"\1 \2", text)
        text = _CAMEL_ACRONYM.sub(r"\1 \2", text)
        return [token.lower() for token in _NON_ALNUM.split(text) if token]

    def cosine(self, text_a: str, text_b: str) -> float:
        """
        Cosine similarity of two texts weighted by TF-IDF over the pair itself

        Term frequency is the raw count and idf = ln((1 + N) / (1 + df)) + 1
        with N = 2, which is TfidfVectorizer's smoothed idf.

        Returns:
            Similarity in [0, 1]; 0 when either text has no tokens
        """
        # Empty token lists share nothing
        if not self.tokenize(text_a) or not self.tokenize(text_b):
            return 0.0

        # the pair is the whole document collection
        vectorizer = TfidfVectorizer(
            tokenizer=self.tokenize,
            lowercase=False,
            token_pattern=None,
            smooth_idf=True,
            sublinear_tf=False,
            norm="l2",
        )
        matrix = vectorizer.fit_transform([text_a, text_b])
        similarity = float(cosine_similarity(matrix[0], matrix[1])[0, 0])
        return min(1.0, max(0.0, similarity))


text_similarity_service = TextSimilarityService()


def tfidf_cosine(text_a: str, text_b: str) -> float:
    return text_similarity_service.cosine(text_a, text_b)
