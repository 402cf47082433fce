import random
from fractions import Fraction as F

import pytest

from qlefschetz.errors import EngineError
from qlefschetz.fock import (
    DarbouxSpace,
    QuadraticHamiltonian,
    cocycle_eval,
    commutator_apply,
    hamiltonian_of,
    hbar_grading_ok,
    is_infinitesimal_symplectic,
    multiplication_operator,
    omega,
    poisson_bracket,
    projective_identity_check,
    quantize,
    random_hamiltonian,
    random_polynomial,
    str_formula_check,
)

Q0 = ("q", 0, 0)
Q1 = ("q", 1, 0)
P0 = ("p", 0, 0)
P1 = ("p", 1, 0)


@pytest.fixture
def space():
    return DarbouxSpace(h_dim=1, z_window=2)


def test_omega_darboux(space):
    f = {P0: F(1)}
    g = {Q0: F(1)}
    assert omega(space, f, g) == 1
    assert omega(space, g, f) == -1
    assert omega(space, f, f) == 0


def test_multiplication_operators_are_symplectic(space):
    for s in (-1, 1):
        T = multiplication_operator(space, [[F(2)]], s)
        assert is_infinitesimal_symplectic(space, T)
    # plain multiplication by a class (z^0) is NOT infinitesimally symplectic
    T0 = multiplication_operator(space, [[F(1)]], 0)
    assert not is_infinitesimal_symplectic(space, T0)


def test_hamiltonian_of_inverse_z(space):
    T = multiplication_operator(space, [[F(1)]], -1)
    H = hamiltonian_of(space, T)
    assert H.coeffs == {
        (Q0, Q0): F(-1, 2),
        (P0, Q1): F(-1),
    }


def test_hamiltonian_of_z(space):
    T = multiplication_operator(space, [[F(1)]], 1)
    H = hamiltonian_of(space, T)
    assert H.coeffs == {
        (P0, P0): F(1, 2),
        (P1, Q0): F(-1),
    }


def test_hamiltonian_of_zero(space):
    H = hamiltonian_of(space, {})
    assert H.is_zero()


def test_hamiltonian_of_rejects_nonsymplectic(space):
    T = multiplication_operator(space, [[F(1)]], 0)
    with pytest.raises(EngineError):
        hamiltonian_of(space, T)


def test_hamiltonian_evaluates_like_form(space):
    rng = random.Random(4)
    T = multiplication_operator(space, [[F(3)]], -1)
    H = hamiltonian_of(space, T)
    for _ in range(10):
        f = {idx: F(rng.randint(-3, 3)) for idx in space.indices()}
        Tf = {}
        for idx, c in f.items():
            for jdx, t in T.get(idx, {}).items():
                Tf[jdx] = Tf.get(jdx, F(0)) + t * c
        assert H.evaluate(f) == omega(space, Tf, f) / 2


def test_quantization_rules(space):
    mono = {((Q0, Q0), 0): F(1)}  # the polynomial q0^2
    qq = quantize(QuadraticHamiltonian(space, {(Q0, Q0): F(1)}))
    assert qq.apply(mono) == {((Q0, Q0, Q0, Q0), -1): F(1)}
    pq = quantize(QuadraticHamiltonian(space, {(Q0, P0): F(1)}))
    assert pq.apply(mono) == {((Q0, Q0), 0): F(2)}
    pp = quantize(QuadraticHamiltonian(space, {(P0, P0): F(1)}))
    assert pp.apply(mono) == {((), 1): F(2)}


def test_cocycle_table(space):
    Fh = QuadraticHamiltonian(space, {(P0, P0): F(1)})
    Gh = QuadraticHamiltonian(space, {(Q0, Q0): F(1)})
    assert cocycle_eval(Fh, Gh) == 2
    assert cocycle_eval(Gh, Fh) == -2
    space2 = DarbouxSpace(h_dim=2, z_window=1)
    Fh2 = QuadraticHamiltonian(space2, {(("p", 0, 0), ("p", 0, 1)): F(1)})
    Gh2 = QuadraticHamiltonian(space2, {(("q", 0, 0), ("q", 0, 1)): F(1)})
    assert cocycle_eval(Fh2, Gh2) == 1
    # mismatch of index sets gives no anomaly
    Hh = QuadraticHamiltonian(space, {(Q1, Q1): F(1)})
    assert cocycle_eval(Fh, Hh) == 0


def test_projective_identity_table_case(space):
    Fh = QuadraticHamiltonian(space, {(P0, P0): F(1)})
    Gh = QuadraticHamiltonian(space, {(Q0, Q0): F(1)})
    poly = {((Q0, Q0), 0): F(1)}
    ok, failure = projective_identity_check(Fh, Gh, poly)
    assert ok, failure


def test_projective_identity_pq_pairs_no_anomaly(space):
    Fh = QuadraticHamiltonian(space, {(Q0, P1): F(2)})
    Gh = QuadraticHamiltonian(space, {(Q1, P0): F(-3)})
    assert cocycle_eval(Fh, Gh) == 0
    poly = {((Q0, Q1), 0): F(1), ((Q0,), 0): F(2)}
    ok, failure = projective_identity_check(Fh, Gh, poly)
    assert ok, failure


def test_projective_identity_random_pairs():
    rng = random.Random(1234)
    for i in range(100):
        sp = DarbouxSpace(h_dim=rng.randint(1, 2), z_window=rng.randint(1, 3))
        Fh = random_hamiltonian(sp, rng)
        Gh = random_hamiltonian(sp, rng)
        poly = random_polynomial(sp, rng)
        ok, failure = projective_identity_check(Fh, Gh, poly)
        assert ok, (i, failure)


def test_bracket_antisymmetry_and_jacobi():
    rng = random.Random(55)
    sp = DarbouxSpace(h_dim=2, z_window=2)
    for _ in range(25):
        A, B, C = (random_hamiltonian(sp, rng) for _ in range(3))
        assert (poisson_bracket(A, B) + poisson_bracket(B, A)).is_zero()
        jac = (
            poisson_bracket(poisson_bracket(A, B), C)
            + poisson_bracket(poisson_bracket(B, C), A)
            + poisson_bracket(poisson_bracket(C, A), B)
        )
        assert jac.is_zero()


def test_cocycle_is_two_cocycle():
    rng = random.Random(77)
    sp = DarbouxSpace(h_dim=2, z_window=2)
    for _ in range(25):
        A, B, C = (random_hamiltonian(sp, rng) for _ in range(3))
        total = (
            cocycle_eval(poisson_bracket(A, B), C)
            + cocycle_eval(poisson_bracket(B, C), A)
            + cocycle_eval(poisson_bracket(C, A), B)
        )
        assert total == 0


def test_str_formula_scalar(space):
    value, half_trace = str_formula_check(space, [[F(3)]], [[F(5)]])
    assert value == half_trace == F(15, 2)


def test_str_formula_random_symmetric():
    rng = random.Random(3)
    for _ in range(20):
        h = rng.randint(1, 2)
        sp = DarbouxSpace(h_dim=h, z_window=rng.randint(2, 3))

        def sym():
            M = [[F(0)] * h for _ in range(h)]
            for a in range(h):
                for b in range(a, h):
                    M[a][b] = M[b][a] = F(rng.randint(-5, 5), rng.randint(1, 3))
            return M

        value, half_trace = str_formula_check(sp, sym(), sym())
        assert value == half_trace


def test_hbar_grading(space):
    assert hbar_grading_ok(
        quantize(QuadraticHamiltonian(space, {(P0, P0): F(1)})), {1}
    )
    assert hbar_grading_ok(
        quantize(QuadraticHamiltonian(space, {(Q0, Q0): F(1)})), {-1}
    )
    assert hbar_grading_ok(
        quantize(QuadraticHamiltonian(space, {(Q0, P0): F(1)})), {0}
    )


def test_commutator_preserves_grading(space):
    # pp against qq: commutator terms act at hbar^0 on a plain polynomial
    Fh = quantize(QuadraticHamiltonian(space, {(P0, P0): F(1)}))
    Gh = quantize(QuadraticHamiltonian(space, {(Q0, Q0): F(1)}))
    poly = {((Q0, Q0), 0): F(1)}
    out = commutator_apply(Fh, Gh, poly)
    assert all(h == 0 for (_, h) in out)
