"""Finite function tables and set files.

Function table (JSON)::

    {"domain": ["-1", "0", "1"], "codomain": ["0", "1"], "map": [1, 0, 1]}

Two-argument tables list the shared argument grid and an n-by-n map::

    {"arguments": ["0", "1"], "codomain": ["0", "1"], "map": [[0, 1], [1, 1]]}

Set file (JSON)::

    {"space": ["-1", "0", "1"], "members": ["-1", "1"]}

with an optional ``"membership"`` list of per-label values in ``[0, 1]``
for fuzzy sets.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

from .state import TENSOR_SEP

PAD_PREFIX = "pad"


class FunctionError(ValueError):
    """A table is malformed or lacks a property a construction needs."""


@dataclass(frozen=True)
class FiniteFunction:
    domain: tuple[str, ...]
    codomain: tuple[str, ...]
    mapping: tuple[int, ...]
    arguments: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple(str(x) for x in self.domain))
        object.__setattr__(self, "codomain", tuple(str(y) for y in self.codomain))
        object.__setattr__(self, "mapping", tuple(int(k) for k in self.mapping))
        if self.arguments is not None:
            object.__setattr__(self, "arguments", tuple(str(a) for a in self.arguments))
        if not self.domain or not self.codomain:
            raise FunctionError("domain and codomain must be non-empty")
        for name, labels in (("domain", self.domain), ("codomain", self.codomain)):
            if len(set(labels)) != len(labels):
                raise FunctionError(f"{name} labels are not unique")
        if len(self.mapping) != len(self.domain):
            raise FunctionError(f"map has {len(self.mapping)} entries for {len(self.domain)} domain labels")
        bad = [k for k in self.mapping if not 0 <= k < len(self.codomain)]
        if bad:
            raise FunctionError(f"map entries out of codomain range [0,{len(self.codomain)}): {bad}")
        if self.arguments is not None and len(self.arguments) ** 2 != len(self.domain):
            raise FunctionError("two-argument table needs n*n domain entries")

    @classmethod
    def binary(cls, arguments: Sequence[str], codomain: Sequence[str], table) -> "FiniteFunction":
        """Two-argument function; ``table[j][k]`` is the codomain ordinal of ``(x_j, x_k)``."""
        args = tuple(str(a) for a in arguments)
        rows = [list(r) for r in table]
        if len(rows) != len(args) or any(len(r) != len(args) for r in rows):
            raise FunctionError(f"two-argument map must be {len(args)}x{len(args)}")
        domain = [f"{a}{TENSOR_SEP}{b}" for a in args for b in args]
        return cls(domain, codomain, [k for r in rows for k in r], arguments=args)

    @classmethod
    def from_callable(cls, domain: Sequence[str], codomain: Sequence[str], fn) -> "FiniteFunction":
        return cls(domain, codomain, [fn(j) for j in range(len(domain))])

    # --- derived statistics ---------------------------------------------

    @property
    def n(self) -> int:
        return len(self.domain)

    @property
    def m(self) -> int:
        return len(self.codomain)

    @property
    def is_binary(self) -> bool:
        return self.arguments is not None

    def __call__(self, j: int, k: int | None = None) -> int:
        if k is None:
            return self.mapping[j]
        return self.mapping[j * len(self.arguments) + k]

    @cached_property
    def multiplicities(self) -> tuple[int, ...]:
        """Preimage multiplicity per codomain ordinal (0 off the range)."""
        c = Counter(self.mapping)
        return tuple(c.get(i, 0) for i in range(self.m))

    @cached_property
    def preimages(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {i: [] for i in range(self.m)}
        for j, i in enumerate(self.mapping):
            out[i].append(j)
        return {i: tuple(js) for i, js in out.items()}

    @cached_property
    def image(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.m) if self.multiplicities[i] > 0)

    @cached_property
    def non_range(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.m) if self.multiplicities[i] == 0)

    @property
    def m_r(self) -> int:
        return len(self.image)

    @property
    def m_nr(self) -> int:
        return self.m - self.m_r

    @property
    def n_o(self) -> int:
        """Nullity of the graph kernel."""
        return self.n - self.m_r

    @cached_property
    def n_b(self) -> int:
        """Domain elements whose image has exactly one preimage."""
        return sum(1 for i in self.mapping if self.multiplicities[i] == 1)

    @property
    def n_n(self) -> int:
        return self.n - self.n_b

    @property
    def m_n(self) -> int:
        """Range elements with two or more preimages."""
        return self.m_r - self.n_b

    @property
    def is_injective(self) -> bool:
        return self.n_b == self.n

    @property
    def is_surjective(self) -> bool:
        return self.m_nr == 0

    @property
    def is_bijective(self) -> bool:
        return self.is_injective and self.is_surjective

    def image_of(self, members: Iterable[int]) -> set[int]:
        return {self.mapping[j] for j in members}

    def binary_image_of(self, a: Iterable[int], b: Iterable[int]) -> set[int]:
        b = list(b)
        return {self(j, k) for j in a for k in b}

    # --- (de)serialisation ----------------------------------------------

    def to_dict(self) -> dict:
        if self.arguments is not None:
            n = len(self.arguments)
            rows = [list(self.mapping[j * n:(j + 1) * n]) for j in range(n)]
            return {"arguments": list(self.arguments), "codomain": list(self.codomain), "map": rows}
        return {"domain": list(self.domain), "codomain": list(self.codomain), "map": list(self.mapping)}

    @classmethod
    def from_dict(cls, d: dict) -> "FiniteFunction":
        try:
            if "arguments" in d:
                return cls.binary(d["arguments"], d["codomain"], d["map"])
            return cls(d["domain"], d["codomain"], d["map"])
        except KeyError as exc:
            raise FunctionError(f"function table is missing field {exc.args[0]!r}") from None
        except TypeError as exc:
            raise FunctionError(f"malformed function table: {exc}") from None


def load_function(path: str | Path) -> FiniteFunction:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FunctionError(f"{path}: not valid JSON ({exc.msg} at line {exc.lineno})") from None
    if not isinstance(data, dict):
        raise FunctionError(f"{path}: expected a JSON object")
    return FiniteFunction.from_dict(data)


def dump_function(f: FiniteFunction, path: str | Path) -> None:
    Path(path).write_text(json.dumps(f.to_dict(), ensure_ascii=False, indent=1) + "\n")


@dataclass(frozen=True)
class SetFile:
    space: tuple[str, ...]
    members: tuple[str, ...]
    membership: tuple[float, ...] | None = None

    def ordinals(self) -> list[int]:
        index = {lab: i for i, lab in enumerate(self.space)}
        return sorted(index[m] for m in self.members)

    def values(self) -> list[float]:
        """Per-label membership values (crisp sets give 0/1)."""
        if self.membership is not None:
            return list(self.membership)
        chosen = set(self.members)
        return [1.0 if lab in chosen else 0.0 for lab in self.space]


def load_set(path: str | Path) -> SetFile:
    try:
        d = json.loads(Path(path).read_text())
        space = tuple(str(s) for s in d["space"])
        members = tuple(str(s) for s in d.get("members", []))
    except json.JSONDecodeError as exc:
        raise FunctionError(f"{path}: not valid JSON ({exc.msg})") from None
    except (KeyError, TypeError):
        raise FunctionError(f"{path}: set file needs a 'space' list and a 'members' list") from None
    unknown = [m for m in members if m not in space]
    if unknown:
        raise FunctionError(f"{path}: members not in space: {unknown}")
    membership = d.get("membership")
    if membership is not None:
        membership = tuple(float(v) for v in membership)
        if len(membership) != len(space) or any(not 0.0 <= v <= 1.0 for v in membership):
            raise FunctionError(f"{path}: membership needs one value in [0,1] per space label")
    return SetFile(space, members, membership)


def pad_square(f: FiniteFunction) -> FiniteFunction:
    """Extend the smaller of domain/codomain with fresh labels so that n == m.

    Extra codomain labels stay out of the range.  Extra domain labels map to
    the image of the first domain element, so crisp inputs drawn from the
    original domain see the same image.
    """
    if f.is_binary:
        raise FunctionError("padding applies to one-argument tables")
    domain, codomain, mapping = list(f.domain), list(f.codomain), list(f.mapping)
    while len(codomain) < len(domain):
        codomain.append(fresh_label(PAD_PREFIX, codomain))
    while len(domain) < len(codomain):
        domain.append(fresh_label(PAD_PREFIX, domain))
        mapping.append(mapping[0])
    return FiniteFunction(domain, codomain, mapping)


def fresh_label(stem: str, taken: Iterable[str]) -> str:
    """First of ``stem1, stem2, ...`` not in ``taken``."""
    taken = set(taken)
    k = 1
    while f"{stem}{k}" in taken:
        k += 1
    return f"{stem}{k}"
