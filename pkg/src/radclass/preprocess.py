"""Report text cleaning, tokenization and vocabulary construction."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

# [** 2150-1-1 **] style tags and bracketed spans holding digits ([1234], [DATE 01/02])
DEFAULT_DEID_PATTERNS = (
    r"\[\*\*.*?\*\*\]",
    r"\[[^\[\]\n]*\d[^\[\]\n]*\]",
)

DEFAULT_HEADER_FOOTER_PATTERNS = (
    r"^\s*(electronically signed|dictated by|transcribed by|signed by|attending radiologist)\b.*$",
    r"^\s*(this report|this document) (has been|was) (electronically )?(signed|verified)\b.*$",
    r"^\s*page \d+ of \d+\s*$",
)

_PUNCT_RE = re.compile(r"[!\"#$%&'()*+,\-./:;<=>?@\[\\\]^_`{|}~]")
_NON_ALNUM_RE = re.compile(r"[^\w\s]|_")
_WS_RE = re.compile(r"\s+")
_WORD_RE = re.compile(r"[^\W_]+")


class PatternError(ValueError):
    pass


def _compile(patterns: Sequence[str], flags: int) -> tuple[re.Pattern, ...]:
    compiled = []
    for p in patterns:
        try:
            compiled.append(re.compile(p, flags))
        except re.error as exc:
            raise PatternError(f"invalid pattern {p!r}: {exc}") from None
    return tuple(compiled)


@dataclass(frozen=True)
class CleanConfig:
    strip_punctuation: bool = True
    strip_non_alphanumeric: bool = True
    deid_patterns: tuple[str, ...] = DEFAULT_DEID_PATTERNS
    header_footer_patterns: tuple[str, ...] = DEFAULT_HEADER_FOOTER_PATTERNS
    lowercase: bool = True
    _deid: tuple = field(init=False, repr=False, compare=False)
    _header: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "deid_patterns", tuple(self.deid_patterns))
        object.__setattr__(self, "header_footer_patterns", tuple(self.header_footer_patterns))
        object.__setattr__(self, "_deid", _compile(self.deid_patterns, re.DOTALL))
        object.__setattr__(self, "_header", _compile(self.header_footer_patterns,
                                                     re.MULTILINE | re.IGNORECASE))

    def to_dict(self) -> dict:
        return {
            "strip_punctuation": self.strip_punctuation,
            "strip_non_alphanumeric": self.strip_non_alphanumeric,
            "deid_patterns": list(self.deid_patterns),
            "header_footer_patterns": list(self.header_footer_patterns),
            "lowercase": self.lowercase,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "CleanConfig":
        return cls(
            strip_punctuation=d["strip_punctuation"],
            strip_non_alphanumeric=d["strip_non_alphanumeric"],
            deid_patterns=tuple(d["deid_patterns"]),
            header_footer_patterns=tuple(d["header_footer_patterns"]),
            lowercase=d["lowercase"],
        )

    def with_header_lines(self, lines: Iterable[str]) -> "CleanConfig":
        """Copy of this config that also removes the given exact lines."""
        extra = tuple(r"^[ \t]*" + re.escape(line.strip()) + r"[ \t]*$" for line in lines)
        return CleanConfig(self.strip_punctuation, self.strip_non_alphanumeric, self.deid_patterns,
                           self.header_footer_patterns + extra, self.lowercase)


def clean_text(raw: str, config: CleanConfig = CleanConfig()) -> str:
    """Remove de-id tags and header/footer lines, then strip characters.

    Stripped characters are replaced by a space so that adjacent words
    stay separate; whitespace runs collapse to one space.
    """
    text = _clean_once(raw, config)
    # stripping can expose a footer at a line start; repeat until stable
    for _ in range(_MAX_PASSES):
        again = _clean_once(text, config)
        if again == text:
            break
        text = again
    return text


_MAX_PASSES = 8


def _clean_once(text: str, config: CleanConfig) -> str:
    for pat in config._deid:
        text = pat.sub(" ", text)
    for pat in config._header:
        text = pat.sub(" ", text)
    if config.strip_punctuation:
        text = _PUNCT_RE.sub(" ", text)
    if config.strip_non_alphanumeric:
        text = _NON_ALNUM_RE.sub(" ", text)
    if config.lowercase:
        text = text.lower()
    return _WS_RE.sub(" ", text).strip()


def frequent_lines(texts: Sequence[str], min_fraction: float = 0.5) -> list[str]:
    """Lines present in more than ``min_fraction`` of the documents.

    Meant for boilerplate detection; feed the result to
    :meth:`CleanConfig.with_header_lines`.
    """
    if not texts:
        return []
    df: Counter[str] = Counter()
    for t in texts:
        df.update({line.strip() for line in t.splitlines() if line.strip()})
    cutoff = min_fraction * len(texts)
    return sorted(line for line, n in df.items() if n > cutoff)


def tokenize(clean: str, min_len: int = 2) -> list[str]:
    """Word-character tokens of length >= ``min_len``; pure numbers are dropped."""
    return [t.lower() for t in _WORD_RE.findall(clean)
            if len(t) >= min_len and not t.isdigit()]


def preprocess(raw: str, config: CleanConfig = CleanConfig()) -> list[str]:
    return tokenize(clean_text(raw, config))


@dataclass(frozen=True)
class Vocabulary:
    tokens: tuple[str, ...]
    token_to_index: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        mapping = {t: i for i, t in enumerate(self.tokens)}
        if len(mapping) != len(self.tokens):
            raise ValueError("vocabulary tokens must be distinct")
        object.__setattr__(self, "token_to_index", mapping)

    @property
    def size(self) -> int:
        return len(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self.token_to_index

    def __getitem__(self, token: str) -> int:
        return self.token_to_index[token]


def build_vocabulary(streams: Iterable[Sequence[str]]) -> Vocabulary:
    """Distinct tokens over all streams, indexed in lexicographic order."""
    distinct: set[str] = set()
    for s in streams:
        distinct.update(s)
    if not distinct:
        raise ValueError("cannot build a vocabulary from empty token streams")
    return Vocabulary(tuple(sorted(distinct)))
