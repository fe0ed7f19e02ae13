"""Monitor templates: deterministic automata compiled from bodies by progression.

States are canonically simplified residual formulas; reading a letter rewrites
the residual.  A state accepts when its residual holds on the all-empty
assignment, which makes word acceptance coincide with the finite-trace
semantics for tuples of unequal length (traces past their end contribute no
atoms).

Automata are explored lazily.  Each state only depends on the atoms occurring
in its residual, so exploration fans out over subsets of those atoms rather
than the full alphabet; the per-state subset count is guarded by
``atom_limit``.  :func:`materialize` converts a lazy automaton into an
explicit :class:`~hypermon.automata.Dfa` for the algebra operations.
"""

import threading

from .automata import Dfa
from .errors import MonitorError, ResourceLimitError, SupportMismatchError
from .formula import (
    FALSE,
    TRUE,
    And,
    Atom,
    FalseF,
    Formula,
    Not,
    Or,
    Next,
    TrueF,
    Until,
    atom_refs,
    free_variables,
    mk_and,
    mk_not,
    mk_or,
    simplify,
)
from .semantics import Trace, eps_eval

DEFAULT_STATE_LIMIT = 100_000
DEFAULT_ATOM_LIMIT = 14
_DNF_TERM_CAP = 4096

_STATE_TYPES = (Atom, TrueF, FalseF, Not, Or, And, Next, Until)


def _dnf(f: Formula, neg: bool):
    """Disjunctive normal form as a set of frozensets of (node, positive)
    literals, where atoms, next- and until-nodes are opaque literals.

    Residuals of progression only combine such literals with not/or/and, so
    this puts every automaton state into a canonical, provably finite shape
    (an antichain of literal sets drawn from the body's subformulas).
    """
    if isinstance(f, TrueF):
        return frozenset() if neg else frozenset({frozenset()})
    if isinstance(f, FalseF):
        return frozenset({frozenset()}) if neg else frozenset()
    if isinstance(f, Not):
        return _dnf(f.sub, not neg)
    if isinstance(f, (Or, And)):
        parts = [_dnf(a, neg) for a in f.args]
        if isinstance(f, Or) != neg:  # disjunction
            out = set()
            for p in parts:
                out |= p
            return frozenset(out)
        terms = frozenset({frozenset()})
        for p in parts:
            new_terms = set()
            for t1 in terms:
                for t2 in p:
                    if any((node, not pos) in t1 for node, pos in t2):
                        continue
                    new_terms.add(t1 | t2)
                    if len(new_terms) > _DNF_TERM_CAP:
                        raise ResourceLimitError(
                            f"residual formula exceeds {_DNF_TERM_CAP} terms"
                        )
            terms = new_terms
        return frozenset(terms)
    if isinstance(f, (Atom, Next, Until)):
        return frozenset({frozenset({(f, not neg)})})
    raise MonitorError(
        f"automaton states must be desugared bodies, got {type(f).__name__}"
    )


def _subsume(terms):
    kept = []
    for t in sorted(terms, key=len):
        if not any(k <= t for k in kept):
            kept.append(t)
    return kept


def canonical_state(f: Formula) -> Formula:
    """Boolean-equivalent canonical form used as the automaton state space."""
    terms = _subsume(_dnf(f, False))
    return mk_or(
        mk_and(node if pos else Not(node) for node, pos in term) for term in terms
    )


def prog(f: Formula, letter: int, bits: dict) -> Formula:
    """Residual of f after reading one letter (bitmask over ``bits``)."""
    if isinstance(f, Atom):
        return TRUE if letter >> bits[f.ref] & 1 else FALSE
    if isinstance(f, (TrueF, FalseF)):
        return f
    if isinstance(f, Not):
        return mk_not(prog(f.sub, letter, bits))
    if isinstance(f, Or):
        return mk_or(prog(a, letter, bits) for a in f.args)
    if isinstance(f, And):
        return mk_and(prog(a, letter, bits) for a in f.args)
    if isinstance(f, Next):
        return f.sub
    if isinstance(f, Until):
        return mk_or(
            (
                prog(f.rhs, letter, bits),
                mk_and((prog(f.lhs, letter, bits), f)),
            )
        )
    raise MonitorError(f"automaton states must be desugared bodies, got {type(f).__name__}")


class TemplateAutomaton:
    """Lazy deterministic automaton over the indexed-atom alphabet.

    States are ints indexing a table of residual formulas.  ``bits`` maps each
    support atom to its bit position; letters are ints in that bit space.
    """

    def __init__(self, body, support, state_limit=DEFAULT_STATE_LIMIT,
                 atom_limit=DEFAULT_ATOM_LIMIT):
        self.support = tuple(support)
        self.bits = {ref: i for i, ref in enumerate(self.support)}
        self.support_mask = (1 << len(self.support)) - 1
        self.state_limit = state_limit
        self.atom_limit = atom_limit
        self.formulas = []
        self.index = {}
        self.acc = []
        self.rel = []
        self.delta = {}
        self.true_sid = -1
        self.false_sid = -1
        # registration appends to parallel tables; concurrent acceptance runs
        # must not interleave those appends
        self._lock = threading.Lock()
        # deep-simplify once so every residual literal is already canonical
        self.initial_state = self._register(canonical_state(simplify(body)))

    def _register(self, f: Formula) -> int:
        sid = self.index.get(f)
        if sid is not None:
            return sid
        with self._lock:
            sid = self.index.get(f)
            if sid is not None:
                return sid
            if len(self.formulas) >= self.state_limit:
                raise ResourceLimitError(
                    f"monitor automaton exceeds {self.state_limit} states"
                )
            sid = len(self.formulas)
            self.formulas.append(f)
            self.acc.append(eps_eval(f))
            mask = 0
            for ref in atom_refs(f):
                mask |= 1 << self.bits[ref]
            self.rel.append(mask)
            if isinstance(f, TrueF):
                self.true_sid = sid
            elif isinstance(f, FalseF):
                self.false_sid = sid
            self.index[f] = sid
        return sid

    def step(self, state: int, letter: int) -> int:
        key = (state, letter & self.rel[state])
        sid = self.delta.get(key)
        if sid is None:
            residual = prog(self.formulas[state], key[1], self.bits)
            sid = self._register(canonical_state(residual))
            self.delta[key] = sid
        return sid

    def accepting(self, state: int) -> bool:
        return self.acc[state]

    def relevant(self, state: int) -> int:
        return self.rel[state]

    def is_dead(self, state: int) -> bool:
        return state == self.false_sid

    def is_universal(self, state: int) -> bool:
        return state == self.true_sid


class InstantiatedAutomaton:
    """Product of a lazy automaton with one concrete trace bound to a variable.

    States are (base state, position in the bound trace).  Letters live in the
    same global bit space as the base, restricted to the remaining atoms.
    """

    def __init__(self, base, var: str, trace: Trace):
        self.base = base
        self.var = var
        self.trace = trace
        self.bits = base.bits
        self.support = tuple(r for r in base.support if r.variable != var)
        mask = 0
        for ref in self.support:
            mask |= 1 << self.bits[ref]
        self.support_mask = mask
        bound_bits = {
            ref.proposition: self.bits[ref]
            for ref in base.support
            if ref.variable == var
        }
        self.tmasks = tuple(
            _project(step, bound_bits) for step in trace.steps
        )
        self.nsteps = len(self.tmasks)
        self.initial_state = (base.initial_state, 0)
        self._acc_memo = {}

    @property
    def state_limit(self):
        return self.base.state_limit

    @property
    def atom_limit(self):
        return self.base.atom_limit

    def step(self, state, letter: int):
        s, j = state
        letter &= self.support_mask
        if j < self.nsteps:
            return (self.base.step(s, letter | self.tmasks[j]), j + 1)
        return (self.base.step(s, letter), j)

    def accepting(self, state) -> bool:
        hit = self._acc_memo.get(state)
        if hit is not None:
            return hit
        s, j = state
        cur = s
        for k in range(j, self.nsteps):
            cur = self.base.step(cur, self.tmasks[k])
        out = self.base.accepting(cur)
        self._acc_memo[state] = out
        return out

    def relevant(self, state) -> int:
        return self.base.relevant(state[0]) & self.support_mask

    def is_dead(self, state) -> bool:
        return self.base.is_dead(state[0])

    def is_universal(self, state) -> bool:
        return self.base.is_universal(state[0])


def _project(step, prop_bits: dict) -> int:
    mask = 0
    for prop in step:
        bit = prop_bits.get(prop)
        if bit is not None:
            mask |= 1 << bit
    return mask


def _submasks_ascending(mask: int):
    """All submasks of ``mask`` in increasing numeric order."""
    positions = [i for i in range(mask.bit_length()) if mask >> i & 1]
    for i in range(1 << len(positions)):
        sub = 0
        for b, pos in enumerate(positions):
            if i >> b & 1:
                sub |= 1 << pos
        yield sub


def lazy_is_empty(auto, start=None, atom_limit=None):
    """Emptiness of the language from ``start`` (default: initial state).

    Returns (True, None) or (False, witness) where the witness is the
    shortest accepting letter sequence (global bitmask ints), smallest letters
    first among equals.  Raises ResourceLimitError when some state's relevant
    atom set exceeds the fan-out guard.
    """
    if atom_limit is None:
        atom_limit = auto.atom_limit
    if start is None:
        start = auto.initial_state
    if auto.accepting(start):
        return False, ()
    parent = {start: None}
    queue = [start]
    while queue:
        next_queue = []
        for state in queue:
            rel = auto.relevant(state)
            if rel.bit_count() > atom_limit:
                raise ResourceLimitError(
                    f"state fan-out over {rel.bit_count()} atoms exceeds the "
                    f"limit of {atom_limit}"
                )
            for letter in _submasks_ascending(rel):
                succ = auto.step(state, letter)
                if succ in parent:
                    continue
                parent[succ] = (state, letter)
                if auto.accepting(succ):
                    word = []
                    cur = succ
                    while parent[cur] is not None:
                        prev, letter = parent[cur]
                        word.append(letter)
                        cur = prev
                    word.reverse()
                    return False, tuple(word)
                next_queue.append(succ)
        queue = next_queue
    return True, None


def materialize(auto, atom_limit=None) -> Dfa:
    """Explicit DFA over the automaton's own support with contiguous bits."""
    if atom_limit is None:
        atom_limit = auto.atom_limit
    support = tuple(auto.support)
    k = len(support)
    if k > atom_limit:
        raise ResourceLimitError(
            f"explicit alphabet over {k} atoms exceeds the limit of {atom_limit}"
        )
    scatter = [1 << auto.bits[ref] for ref in support]

    def to_global(local: int) -> int:
        g = 0
        for i in range(k):
            if local >> i & 1:
                g |= scatter[i]
        return g

    order = [auto.initial_state]
    ids = {auto.initial_state: 0}
    rows = []
    for state in order:
        rel = auto.relevant(state)
        succ_of_class = {}
        for cls in _submasks_ascending(rel):
            succ = auto.step(state, cls)
            if succ not in ids:
                ids[succ] = len(order)
                order.append(succ)
            succ_of_class[cls] = ids[succ]
        row = tuple(
            succ_of_class[to_global(letter) & rel] for letter in range(1 << k)
        )
        rows.append(row)
    accepting = frozenset(i for i, st in enumerate(order) if auto.accepting(st))
    return Dfa(support, 0, accepting, tuple(rows))


def run_masks(auto, mask_lists) -> bool:
    """Run the joint word of per-variable mask sequences; True iff accepted."""
    length = 0
    for ml in mask_lists:
        if len(ml) > length:
            length = len(ml)
    state = auto.initial_state
    for j in range(length):
        letter = 0
        for ml in mask_lists:
            if j < len(ml):
                letter |= ml[j]
        state = auto.step(state, letter)
        if auto.is_dead(state):
            return False
        if auto.is_universal(state):
            return True
    return auto.accepting(state)


def trace_masks(auto, var: str, trace: Trace):
    """Project a trace onto the automaton's atoms for one variable."""
    prop_bits = {
        ref.proposition: auto.bits[ref]
        for ref in auto.support
        if ref.variable == var
    }
    return [_project(step, prop_bits) for step in trace.steps]


class MonitorTemplate:
    """A compiled body with free trace variables, instantiable at runtime."""

    def __init__(self, automaton, free_vars, bound=None, body=None):
        self.automaton = automaton
        self.free_variables = tuple(free_vars)
        self.bound = dict(bound or {})
        self.body = body
        self._dfa = None

    @property
    def support(self):
        return self.automaton.support

    @property
    def dfa(self) -> Dfa:
        """Explicit automaton over the remaining support (built on demand)."""
        if self._dfa is None:
            self._dfa = materialize(self.automaton)
        return self._dfa

    def accepts(self, assignment: dict) -> bool:
        """Acceptance of a tuple covering exactly the free variables."""
        if set(assignment) != set(self.free_variables):
            raise MonitorError(
                f"assignment covers {sorted(assignment)}, "
                f"template needs {sorted(self.free_variables)}"
            )
        mask_lists = [
            trace_masks(self.automaton, var, trace)
            for var, trace in assignment.items()
        ]
        return run_masks(self.automaton, mask_lists)

    def instantiate(self, trace: Trace, var: str) -> "MonitorTemplate":
        if var not in self.free_variables:
            raise MonitorError(f"variable {var!r} is not free in this template")
        auto = InstantiatedAutomaton(self.automaton, var, trace)
        free = tuple(v for v in self.free_variables if v != var)
        bound = dict(self.bound)
        bound[var] = trace
        return MonitorTemplate(auto, free, bound, self.body)


def build_template(body: Formula, variables, support=None,
                   state_limit=DEFAULT_STATE_LIMIT,
                   atom_limit=DEFAULT_ATOM_LIMIT) -> MonitorTemplate:
    """Compile a desugared body into a monitor template.

    ``support`` defaults to the atoms of the body; when given it must cover
    them.  The automaton is built lazily; ``state_limit`` caps distinct
    residuals and ``atom_limit`` caps explicit-alphabet fan-outs.
    """
    _check_state_types(body)
    variables = tuple(variables)
    missing = free_variables(body) - set(variables)
    if missing:
        raise MonitorError(f"body mentions unbound variables {sorted(missing)}")
    atoms = sorted(atom_refs(body))
    if support is None:
        support = tuple(atoms)
    else:
        support = tuple(support)
        if not set(atoms) <= set(support):
            raise SupportMismatchError(
                f"support is missing atoms {sorted(set(atoms) - set(support))}"
            )
    bad = {r.variable for r in support} - set(variables)
    if bad:
        raise SupportMismatchError(f"support mentions unknown variables {sorted(bad)}")
    auto = TemplateAutomaton(body, support, state_limit, atom_limit)
    return MonitorTemplate(auto, variables, {}, body)


def _check_state_types(f: Formula) -> None:
    stack = [f]
    while stack:
        node = stack.pop()
        if not isinstance(node, _STATE_TYPES):
            raise MonitorError(
                f"body must be desugared before compilation, got {type(node).__name__}"
            )
        if isinstance(node, (Not, Next)):
            stack.append(node.sub)
        elif isinstance(node, (Or, And)):
            stack.extend(node.args)
        elif isinstance(node, Until):
            stack.append(node.lhs)
            stack.append(node.rhs)


def rejecting_position(auto, letters) -> int:
    """Length of the shortest prefix after which no extension can be accepted.

    Falls back to ``len(letters)`` when no such prefix exists (the rejection
    then hinges on the traces ending where they do) or when an emptiness
    check trips a resource guard.
    """
    state = auto.initial_state
    empties = {}
    for consumed in range(len(letters) + 1):
        known = empties.get(state)
        if known is None:
            try:
                known, _ = lazy_is_empty(auto, start=state)
            except ResourceLimitError:
                known = False
            empties[state] = known
        if known:
            return consumed
        if consumed < len(letters):
            state = auto.step(state, letters[consumed])
    return len(letters)
