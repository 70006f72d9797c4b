"""Oriented term rewriting on free-algebra elements.

A rule replaces one word (its left-hand side) by an element all of whose
words are strictly smaller under the term order (length, then lexicographic
by generator); this makes every reduction step strictly decrease the
multiset of support words, so normal forms always exist.  Rules are monic:
the left-hand side carries coefficient 1, so a rule applies to a term
regardless of the term's coefficient.

``critical_pairs`` enumerates overlap and containment ambiguities between
left-hand sides; ``complete`` resolves them Knuth-Bendix style up to a
degree bound, orienting each non-joinable difference whose leading
coefficient is a unit of R_n into a new rule and reporting the rest as
failures.

Systems are immutable after construction; ``normal_form`` is pure and may
run concurrently on many inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .freealg import AlgElement, Generator, Word, word_key, word_str

__all__ = [
    "RuleError",
    "StepBudgetExceeded",
    "Rule",
    "RewriteSystem",
    "CriticalPair",
    "ConfluenceReport",
    "critical_pairs",
    "complete",
]


class RuleError(ValueError):
    """The proposed rule does not strictly decrease the term order."""


class StepBudgetExceeded(RuntimeError):
    """normal_form exceeded its step cap; the rule set does not terminate."""


def find_subword(word: Word, sub: Word) -> int:
    """Index of the leftmost occurrence of ``sub`` in ``word``, or -1."""
    n, m = len(word), len(sub)
    for i in range(n - m + 1):
        if word[i : i + m] == sub:
            return i
    return -1


@dataclass(frozen=True)
class Rule:
    lhs: Word
    rhs: AlgElement

    def __post_init__(self):
        if not self.lhs:
            raise RuleError("rule lhs must be a nonempty word")
        lk = word_key(self.lhs)
        for w in self.rhs.support():
            if word_key(w) >= lk:
                raise RuleError(
                    f"rule {word_str(self.lhs)} -> {self.rhs} does not decrease the term order"
                )

    def __str__(self) -> str:
        return f"{word_str(self.lhs)} -> {self.rhs}"


def _multiset_key(x: AlgElement) -> tuple:
    """Dershowitz-Manna multiset order on support words, via sorted keys."""
    return tuple(sorted((word_key(w) for w in x.support()), reverse=True))


@dataclass(frozen=True)
class RewriteSystem:
    arity: int
    rules: tuple[Rule, ...]
    max_steps: int = 100_000

    def __post_init__(self):
        for r in self.rules:
            if r.rhs.arity != self.arity:
                raise RuleError("rule coefficient arity differs from system arity")

    def generators(self) -> frozenset[Generator]:
        gens: set[Generator] = set()
        for r in self.rules:
            gens.update(r.lhs)
            for w in r.rhs.support():
                gens.update(w)
        return frozenset(gens)

    def find_redex(self, word: Word) -> tuple[int, int] | None:
        """(rule index, position) of the first matching rule's leftmost match."""
        for ri, rule in enumerate(self.rules):
            pos = find_subword(word, rule.lhs)
            if pos >= 0:
                return ri, pos
        return None

    def apply_at(self, x: AlgElement, word: Word, rule_index: int, pos: int) -> AlgElement:
        """Rewrite the full ``word`` term of ``x`` using one rule occurrence."""
        rule = self.rules[rule_index]
        if word[pos : pos + len(rule.lhs)] != rule.lhs:
            raise ValueError("rule lhs does not occur at the given position")
        c = x.coeff(word)
        if not c:
            raise ValueError("word is not in the support of the element")
        pre = AlgElement.from_word(word[:pos], self.arity)
        post = AlgElement.from_word(word[pos + len(rule.lhs) :], self.arity)
        replaced = (pre * rule.rhs * post).scale(c)
        return x - AlgElement.from_word(word, self.arity, c) + replaced

    def reduce_once(self, x: AlgElement) -> AlgElement | None:
        """One reduction step at the largest reducible word, or None if normal.

        Within that word the first rule in system order wins and is applied
        at its leftmost occurrence, so reduction is deterministic.
        """
        for word in sorted(x.support(), key=word_key, reverse=True):
            hit = self.find_redex(word)
            if hit is not None:
                ri, pos = hit
                return self.apply_at(x, word, ri, pos)
        return None

    def is_normal(self, x: AlgElement) -> bool:
        return all(self.find_redex(w) is None for w in x.support())

    def normal_form(self, x: AlgElement) -> AlgElement:
        cur = x
        steps = 0
        while True:
            nxt = self.reduce_once(cur)
            if nxt is None:
                return cur
            steps += 1
            if steps > self.max_steps:
                raise StepBudgetExceeded(f"no normal form after {self.max_steps} steps")
            assert _multiset_key(nxt) < _multiset_key(cur), "reduction step did not decrease the term order"
            cur = nxt


@dataclass(frozen=True)
class CriticalPair:
    """An ambiguity word together with its two one-step reducts."""

    word: Word
    left: AlgElement
    right: AlgElement

    def __str__(self) -> str:
        return f"{word_str(self.word)}: {self.left}  vs  {self.right}"


def critical_pairs(system: RewriteSystem, max_overlap_len: int) -> list[CriticalPair]:
    """All overlap and containment ambiguities with word length <= the bound.

    Overlaps include self-overlaps of a rule with itself.  Each pair carries
    the two one-step reducts of the ambiguity word (coefficient 1).
    """
    max_lhs = max((len(r.lhs) for r in system.rules), default=0)
    if system.rules and max_overlap_len < max_lhs:
        raise ValueError(f"max_overlap_len {max_overlap_len} < longest lhs {max_lhs}")
    pairs: list[CriticalPair] = []
    for ia, ra in enumerate(system.rules):
        for ib, rb in enumerate(system.rules):
            la, lb = ra.lhs, rb.lhs
            # Proper suffix/prefix overlaps: la = u s, lb = s w with s nonempty.
            for k in range(1, min(len(la), len(lb))):
                if la[-k:] == lb[:k]:
                    word = la + lb[k:]
                    if len(word) <= max_overlap_len:
                        base = AlgElement.from_word(word, system.arity)
                        left = system.apply_at(base, word, ia, 0)
                        right = system.apply_at(base, word, ib, len(la) - k)
                        pairs.append(CriticalPair(word, left, right))
            # Containment: lb a proper subword of la.
            if len(lb) < len(la) and len(la) <= max_overlap_len:
                for pos in range(len(la) - len(lb) + 1):
                    if la[pos : pos + len(lb)] == lb:
                        base = AlgElement.from_word(la, system.arity)
                        left = system.apply_at(base, la, ia, 0)
                        right = system.apply_at(base, la, ib, pos)
                        pairs.append(CriticalPair(la, left, right))
    return pairs


@dataclass
class ConfluenceReport:
    """Outcome of resolving critical pairs up to a degree bound."""

    joinable: list[CriticalPair] = field(default_factory=list)
    failures: list[tuple[CriticalPair, AlgElement, AlgElement]] = field(default_factory=list)
    added_rules: list[Rule] = field(default_factory=list)

    @property
    def confluent(self) -> bool:
        return not self.failures

    def lines(self) -> list[str]:
        out = [
            f"critical pairs joinable: {len(self.joinable)}",
            f"rules added: {len(self.added_rules)}",
            f"failures: {len(self.failures)}",
        ]
        for r in self.added_rules:
            out.append(f"  added {r}")
        for cp, n1, n2 in self.failures:
            out.append(f"  FAIL {word_str(cp.word)}: {n1}  !=  {n2}")
        return out


def complete(system: RewriteSystem, degree_bound: int) -> tuple[RewriteSystem, ConfluenceReport]:
    """Knuth-Bendix style completion up to ``degree_bound``.

    Repeatedly normalizes both reducts of each critical pair; a non-joinable
    difference is oriented into a new rule (leading word -> lower terms) when
    its leading coefficient is a unit of R_n, otherwise it is reported as a
    failure and left alone.  Sound because every added rule is a consequence
    of the existing ones.
    """
    rules = list(system.rules)
    added: list[Rule] = []
    while True:
        sysx = RewriteSystem(system.arity, tuple(rules), system.max_steps)
        report = ConfluenceReport(added_rules=added)
        progressed = False
        for cp in critical_pairs(sysx, degree_bound):
            n1 = sysx.normal_form(cp.left)
            n2 = sysx.normal_form(cp.right)
            if n1 == n2:
                report.joinable.append(cp)
                continue
            diff = n1 - n2
            lead = diff.leading_word()
            c = diff.coeff(lead)
            cinv = c.try_unit_inverse()
            if cinv is None:
                report.failures.append((cp, n1, n2))
                continue
            rhs = (AlgElement.from_word(lead, system.arity, c) - diff).scale(cinv)
            rule = Rule(lead, rhs)
            rules.append(rule)
            added.append(rule)
            progressed = True
            break
        if not progressed:
            return sysx, report
