"""Dataclass models for hash family parameters, bound reports and matrices."""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

import numpy as np

from src.hashbounds.errors import InvalidParameterError, MatrixFormatError

logger = logging.getLogger(__name__)


class Family(str, enum.Enum):
    PHF = "phf"
    SHF = "shf"


class BadEventPolicy(str, enum.Enum):
    """How the Moser-Tardos loop picks one of several occurring bad events."""

    LEX_FIRST = "lex_first"
    RANDOM = "random"


class WitnessKind(str, enum.Enum):
    BAD_SUBSET = "bad_subset"
    BAD_FAMILY = "bad_family"


class Winner(str, enum.Enum):
    CLLL = "clll"
    EXPURGATION = "expurgation"


@dataclass(frozen=True)
class PhfSpec:
    """Parameters of a perfect hash family PHF(N; n, m, w).

    Attributes:
        n: Number of columns.
        m: Alphabet size.
        w: Size of the column subsets that must be separated injectively.
    """

    n: int
    m: int
    w: int

    def __post_init__(self) -> None:
        if not 2 <= self.w <= self.n:
            raise InvalidParameterError(
                f"need 2 <= w <= n, got w={self.w}, n={self.n}"
            )
        if self.m < 2:
            raise InvalidParameterError(f"need m >= 2, got m={self.m}")

    @property
    def family(self) -> Family:
        return Family.PHF

    @property
    def parts(self) -> tuple[int, ...]:
        """A PHF separates w singletons: injective on W is separating {{c} : c in W}."""
        return (1,) * self.w

    @property
    def label(self) -> str:
        return str(self.w)


@dataclass(frozen=True)
class ShfSpec:
    """Parameters of a separating hash family SHF(N; n, m, {w_1, ..., w_s}).

    ``parts`` is normalised to ascending order; it is a multiset.
    """

    n: int
    m: int
    parts: tuple[int, ...]

    def __post_init__(self) -> None:
        parts = tuple(sorted(int(p) for p in self.parts))
        object.__setattr__(self, "parts", parts)
        if len(parts) < 2:
            raise InvalidParameterError(f"need s >= 2 parts, got {list(parts)}")
        if any(p < 1 for p in parts):
            raise InvalidParameterError(f"part sizes must be positive, got {list(parts)}")
        if not 2 <= self.w <= self.n:
            raise InvalidParameterError(
                f"need 2 <= w = sum(parts) <= n, got w={self.w}, n={self.n}"
            )
        if self.m < 2:
            raise InvalidParameterError(f"need m >= 2, got m={self.m}")

    @property
    def family(self) -> Family:
        return Family.SHF

    @property
    def w(self) -> int:
        return sum(self.parts)

    @property
    def s(self) -> int:
        return len(self.parts)

    @property
    def label(self) -> str:
        return ",".join(str(p) for p in self.parts)


FamilySpec = Union[PhfSpec, ShfSpec]


def parse_parts(text: str) -> tuple[int, ...]:
    """Parse "1,2" or "1+2" into a parts tuple."""
    pieces = [piece for piece in text.replace("+", ",").split(",") if piece.strip()]
    try:
        return tuple(int(piece) for piece in pieces)
    except ValueError as exc:
        raise InvalidParameterError(f"cannot parse parts {text!r}: {exc}") from exc


@dataclass(frozen=True)
class ClusterPolynomial:
    """Psi(mu) = 1 + sum_k Gamma_k mu^k for the w-subset dependency graph on [n].

    Attributes:
        w: Subset size.
        n: Ground set size.
        gammas: Exact Gamma_1..Gamma_K.
        log_gammas: ln Gamma_1..ln Gamma_K.
    """

    w: int
    n: int
    gammas: tuple[int, ...]
    log_gammas: tuple[float, ...]

    @property
    def degree(self) -> int:
        return len(self.gammas)


@dataclass(frozen=True)
class StationaryPoint:
    """Maximiser of mu / Psi(mu).

    ``attained`` is False in the degree-1 case, where mu_star is infinite and
    log_max_ratio is the supremum -ln Gamma_1.
    """

    mu_star: float
    log_max_ratio: float
    attained: bool = True


# Stable field order for JSON keys and CSV columns
REPORT_FIELDS: tuple[str, ...] = (
    "family",
    "n",
    "m",
    "w",
    "parts",
    "n_clll",
    "n_lll",
    "n_expurgation",
    "a_n",
    "d_m",
    "log_phi_prime",
    "m_w",
    "q",
    "sz_max_columns",
    "clll_max_columns",
    "attained",
    "expected_resamples",
)


def _finite_or_none(value: float | None) -> float | None:
    return value if value is not None and math.isfinite(value) else None


@dataclass
class BoundReport:
    """All bounds computed for one parameter set.

    Attributes:
        spec: The PHF or SHF parameters.
        a_n: A_n(w) for PHF, S_n(w) = A_n(w) + ln m_w for SHF.
        d_m: D_m(w) for PHF, ln(1/q) for SHF.
        n_clll: Minimal N from the cluster expansion bound.
        n_lll: Minimal N from the plain local lemma (PHF only).
        n_expurgation: Minimal N from expurgation (PHF, or SHF with s = 2).
        sz_max_columns: Stinson-Zaverucha maximum n at N = n_clll (SHF, s = 2).
        clll_max_columns: Asymptotic cluster expansion maximum n at N = n_clll.
        q: Exact per-row failure probability.
        log_phi_prime: ln phi'(tau).
        m_w: Number of families per union set (1 for PHF).
        attained: False when the cluster maximum is a supremum (n < 2w).
        expected_resamples: Moser-Tardos expected resample bound C(n,w) * mu*. Serialized as
            None when it overflows a double.
    """

    spec: FamilySpec
    a_n: float
    d_m: float
    n_clll: int
    q: Fraction
    log_phi_prime: float | None
    m_w: int = 1
    n_lll: int | None = None
    n_expurgation: int | None = None
    sz_max_columns: int | None = None
    clll_max_columns: int | None = None
    attained: bool = True
    expected_resamples: float | None = None

    def to_dict(self) -> dict:
        """Plain dict in REPORT_FIELDS order; reals keep full precision."""
        values = {
            "family": self.spec.family.value,
            "n": self.spec.n,
            "m": self.spec.m,
            "w": self.spec.w,
            "parts": self.spec.label if self.spec.family is Family.SHF else None,
            "n_clll": self.n_clll,
            "n_lll": self.n_lll,
            "n_expurgation": self.n_expurgation,
            "a_n": self.a_n,
            "d_m": self.d_m,
            "log_phi_prime": self.log_phi_prime,
            "m_w": self.m_w,
            "q": f"{self.q.numerator}/{self.q.denominator}",
            "sz_max_columns": self.sz_max_columns,
            "clll_max_columns": self.clll_max_columns,
            "attained": self.attained,
            "expected_resamples": _finite_or_none(self.expected_resamples),
        }
        return {key: values[key] for key in REPORT_FIELDS}


@dataclass
class HashMatrix:
    """An N x n matrix over the alphabet {1..m}.

    Entries are stored as a C-ordered int64 numpy array.
    """

    entries: np.ndarray
    alphabet: int

    def __post_init__(self) -> None:
        self.entries = np.ascontiguousarray(self.entries, dtype=np.int64)
        if self.entries.ndim != 2 or self.entries.shape[0] < 1 or self.entries.shape[1] < 1:
            raise InvalidParameterError(
                f"matrix must be 2-dimensional and non-empty, got shape {self.entries.shape}"
            )
        if self.alphabet < 2:
            raise InvalidParameterError(f"need alphabet m >= 2, got {self.alphabet}")
        if self.entries.min() < 1 or self.entries.max() > self.alphabet:
            raise InvalidParameterError(f"entries must lie in [1..{self.alphabet}]")

    @property
    def rows(self) -> int:
        return int(self.entries.shape[0])

    @property
    def cols(self) -> int:
        return int(self.entries.shape[1])

    @classmethod
    def from_rows(cls, rows: list[list[int]], alphabet: int | None = None) -> HashMatrix:
        """Build a matrix from nested lists; the alphabet defaults to the largest entry (at least 2)."""
        entries = np.array(rows, dtype=np.int64)
        if alphabet is None:
            alphabet = max(2, int(entries.max()))
        return cls(entries=entries, alphabet=alphabet)

    def to_text(self, spec: FamilySpec) -> str:
        """Serialize as the header line ``PHF N n m w`` / ``SHF N n m w1,..,ws`` plus N rows."""
        if spec.n != self.cols or spec.m != self.alphabet:
            raise InvalidParameterError(
                f"spec (n={spec.n}, m={spec.m}) does not match matrix "
                f"(n={self.cols}, m={self.alphabet})"
            )
        header = f"{spec.family.value.upper()} {self.rows} {self.cols} {self.alphabet} {spec.label}"
        body = [" ".join(str(int(x)) for x in row) for row in self.entries]
        return "\n".join([header, *body]) + "\n"

    @classmethod
    def from_text(cls, text: str) -> tuple[HashMatrix, FamilySpec]:
        """Parse the text format written by ``to_text``.

        Raises:
            MatrixFormatError: naming the offending line (and column where useful).
        """
        lines = text.splitlines()
        if not lines:
            raise MatrixFormatError("empty file", line=1)

        fields = lines[0].split()
        if len(fields) != 5 or fields[0] not in ("PHF", "SHF"):
            raise MatrixFormatError(
                "header must be 'PHF N n m w' or 'SHF N n m w1,...,ws'", line=1
            )
        try:
            n_rows, n_cols, alphabet = (int(x) for x in fields[1:4])
            if fields[0] == "PHF":
                spec: FamilySpec = PhfSpec(n=n_cols, m=alphabet, w=int(fields[4]))
            else:
                spec = ShfSpec(n=n_cols, m=alphabet, parts=parse_parts(fields[4]))
        except (ValueError, InvalidParameterError) as exc:
            raise MatrixFormatError(f"bad header: {exc}", line=1) from exc

        body = lines[1:]
        while body and not body[-1].strip():
            body.pop()
        if len(body) != n_rows:
            raise MatrixFormatError(
                f"header announces {n_rows} rows, found {len(body)}", line=len(body) + 2
            )

        rows: list[list[int]] = []
        for line_no, line in enumerate(body, start=2):
            tokens = line.split()
            if len(tokens) != n_cols:
                raise MatrixFormatError(
                    f"expected {n_cols} entries, found {len(tokens)}", line=line_no
                )
            row: list[int] = []
            for col_no, token in enumerate(tokens, start=1):
                try:
                    value = int(token)
                except ValueError:
                    raise MatrixFormatError(
                        f"not an integer: {token!r}", line=line_no, column=col_no
                    ) from None
                if not 1 <= value <= alphabet:
                    raise MatrixFormatError(
                        f"entry {value} outside [1..{alphabet}]", line=line_no, column=col_no
                    )
                row.append(value)
            rows.append(row)

        return cls(entries=np.array(rows, dtype=np.int64), alphabet=alphabet), spec


@dataclass
class MtStats:
    """Statistics of one Moser-Tardos run.

    Attributes:
        seed: 64-bit seed of the PCG64 stream.
        resamples: Resampling steps performed.
        scans: Bad-event checks performed (one per event per sweep).
        comparisons: Pairwise entry comparisons those checks cost.
        succeeded: True once no bad event occurs.
        elapsed: Wall-clock seconds.
        transcript: Selected events in order (only when recording was requested).
    """

    seed: int
    policy: BadEventPolicy = BadEventPolicy.LEX_FIRST
    resamples: int = 0
    scans: int = 0
    comparisons: int = 0
    succeeded: bool = False
    elapsed: float = 0.0
    transcript: list[tuple[tuple[int, ...], ...]] = field(default_factory=list)


@dataclass(frozen=True)
class Witness:
    """A subset (PHF) or disjoint family (SHF) that no row separates.

    Columns are 1-based; ``parts`` holds one tuple for a PHF subset.
    """

    kind: WitnessKind
    parts: tuple[tuple[int, ...], ...]

    @property
    def columns(self) -> tuple[int, ...]:
        return tuple(sorted(c for part in self.parts for c in part))

    def __str__(self) -> str:
        if self.kind is WitnessKind.BAD_SUBSET:
            return "{" + ",".join(str(c) for c in self.parts[0]) + "}"
        return "{" + ",".join("{" + ",".join(str(c) for c in part) + "}" for part in self.parts) + "}"


@dataclass
class RunOutcome:
    """Result of one construction in a batch: the matrix on success, always the stats."""

    stats: MtStats
    matrix: HashMatrix | None = None
