from fractions import Fraction as F

import pytest

from qlefschetz import (
    BundleSpec,
    CohElement,
    ExtractionError,
    LambdaScalar,
    QSeries,
    REDUCED,
    RingDescriptor,
    UnitError,
    ZSeries,
    birkhoff,
    extract_instantons,
    frame_series,
    i_function,
    invert_series,
    j_reduced,
    small_mirror,
)

from schubert import lines_on_quintic

QUINTIC = BundleSpec((5,), equivariant=False)


def quintic_mirror(D):
    J = j_reduced(5, D)
    I = i_function(J, QUINTIC)
    return small_mirror(I, bundle=QUINTIC)


# -- identity regimes -----------------------------------------------------------


@pytest.mark.parametrize("n,l", [(5, 1), (5, 2), (5, 3), (6, 4)])
def test_low_degree_is_identity(n, l):
    J = j_reduced(n, 5)
    E = BundleSpec((l,), equivariant=False)
    I = i_function(J, E)
    M = birkhoff(I, bundle=E)
    assert M.corrections_vanish()
    assert M.J_out == I
    assert M.tau_of_q.is_zero()
    assert M.tau0_of_q.is_zero()
    assert M.F == QSeries.one(I.desc, 5)


@pytest.mark.parametrize("n,l", [(4, 3), (5, 4)])
def test_critical_degree_string_shift(n, l):
    J = j_reduced(n, 5)
    E = BundleSpec((l,), equivariant=False)
    I = i_function(J, E)
    M = birkhoff(I, bundle=E)
    fact = 1
    for i in range(2, l + 1):
        fact *= i
    assert M.corrections_vanish()
    assert M.tau_of_q.is_zero()
    assert M.tau0_of_q.coefficient(1).as_rational() == fact
    for d in range(2, 6):
        assert M.tau0_of_q.coefficient(d).is_zero()
    # the string shift re-expands the slices: J_out differs from I at d >= 2
    assert M.J_out != I
    assert M.J_out.slice(0) == I.slice(0)


# -- quintic --------------------------------------------------------------------


def test_quintic_map_coefficients():
    M = quintic_mirror(3)
    assert M.F.coefficient(0).as_rational() == 1
    assert M.F.coefficient(1).as_rational() == 120
    assert M.tau_of_q.coefficient(0).is_zero()
    assert M.tau_of_q.coefficient(1).as_rational() == 770
    assert M.small_projection


def test_quintic_two_paths_agree():
    J = j_reduced(5, 3)
    I = i_function(J, QUINTIC)
    Mb = birkhoff(I, bundle=QUINTIC)
    Ms = small_mirror(I, bundle=QUINTIC)
    assert Mb.J_out == Ms.J_out
    assert Mb.tau_of_q == Ms.tau_of_q
    assert Mb.tau0_of_q == Ms.tau0_of_q


def test_critical_degree_two_paths_agree():
    J = j_reduced(5, 4)
    E = BundleSpec((4,), equivariant=False)
    I = i_function(J, E)
    Mb = birkhoff(I, bundle=E)
    Ms = small_mirror(I, bundle=E)
    assert Mb.J_out == Ms.J_out
    assert Mb.tau0_of_q == Ms.tau0_of_q


def test_quintic_mirror_map_roundtrip():
    M = quintic_mirror(5)
    u = M.q_of_tau
    # u(q') exp(tau(u(q'))) == q' through q^5
    check = u * M.tau_of_q.compose(u).exp()
    assert check == QSeries.from_rationals(M.desc, 5, {1: F(1)})


def test_instantons_match_oracle_and_classical_values():
    M = quintic_mirror(5)
    counts = extract_instantons(M, 5)
    assert counts[0] == lines_on_quintic() == 2875
    assert counts == [2875, 609250, 317206375, 242467530000, 229305888887625]


def test_instantons_require_quintic_configuration():
    J = j_reduced(5, 2)
    E = BundleSpec((4,), equivariant=False)
    M = birkhoff(i_function(J, E), bundle=E)
    with pytest.raises(ExtractionError):
        extract_instantons(M, 2)
    M2 = quintic_mirror(2)
    with pytest.raises(ExtractionError):
        extract_instantons(M2, 3)  # beyond the truncation


def test_extraction_detects_corrupted_series():
    M = quintic_mirror(2)
    desc = M.desc
    bad = M.J_out + ZSeries(
        desc, 2, {1: {-2: CohElement.p_power(desc, 2, F(1, 7))}}, REDUCED,
    )
    from dataclasses import replace

    with pytest.raises(ExtractionError):
        extract_instantons(replace(M, J_out=bad), 2)


# -- equivariant route ------------------------------------------------------------


def test_equivariant_limit_matches_nonequivariant():
    desc = RingDescriptor(n=5, lambda_floor=2)
    J = j_reduced(5, 3, desc=desc)
    Eeq = BundleSpec((5,), equivariant=True)
    Meq = birkhoff(i_function(J, Eeq), bundle=Eeq)
    Mnon = small_mirror(
        i_function(J.lambda_zero_part(), QUINTIC), bundle=QUINTIC
    )
    assert Meq.J_out.lambda_zero_part() == Mnon.J_out
    for d in range(4):
        assert (
            Meq.tau_of_q.coefficient(d).lambda_zero_part()
            == Mnon.tau_of_q.coefficient(d).lambda_zero_part()
        )
    # the equivariant string shift starts at 274 lam q
    assert Meq.tau0_of_q.coefficient(1).coefficient(1) == 274


def test_degree_above_dimension_rejected_nonequivariantly():
    J = j_reduced(5, 2)
    E = BundleSpec((6,), equivariant=False)
    I = i_function(J, E)
    with pytest.raises(UnitError):
        small_mirror(I, bundle=E)


def test_degree_above_dimension_runs_equivariantly():
    desc = RingDescriptor(n=5, lambda_floor=2)
    J = j_reduced(5, 2, desc=desc)
    E = BundleSpec((6,), equivariant=True)
    I = i_function(J, E)
    M = birkhoff(I, bundle=E)
    # positive z-powers force genuine frame corrections
    assert not M.corrections_vanish()
    # eliminated output is clean: no non-negative z-powers at positive degree
    for d in range(1, 3):
        assert all(ze < 0 for ze in M.normalized.z_exponents(d))


def test_back_substitution_reproduces_normalized_series():
    desc = RingDescriptor(n=5, lambda_floor=2)
    J = j_reduced(5, 2, desc=desc)
    for E in (BundleSpec((6,), equivariant=True), BundleSpec((5,), equivariant=True)):
        I = i_function(J, E)
        M = birkhoff(I, bundle=E)
        frame = frame_series(I, 5)
        recomposed = I
        for a, cell in enumerate(M.c_coeffs):
            for ze, qs in cell.items():
                shifted = ZSeries(
                    I.desc,
                    I.max_degree,
                    {
                        d: {z + ze: el for z, el in row.items()}
                        for d, row in frame[a].slices.items()
                    },
                    REDUCED,
                )
                recomposed = recomposed + shifted.scale_qseries(qs)
        assert recomposed == M.normalized


# -- series inversion ---------------------------------------------------------------


def test_invert_series_identity():
    desc = RingDescriptor(n=2)
    h = QSeries.zero(desc, 4)
    u = invert_series(h)
    assert u == QSeries.from_rationals(desc, 4, {1: F(1)})


def test_invert_series_linear_exponent():
    desc = RingDescriptor(n=2)
    c = F(3)
    h = QSeries(desc, 3, {1: LambdaScalar.from_rational(desc, c)})
    u = invert_series(h)
    assert u.coefficient(1).as_rational() == 1
    assert u.coefficient(2).as_rational() == -c
    assert u.coefficient(3).as_rational() == 3 * c * c / 2
    # back-substitution
    assert u * h.compose(u).exp() == QSeries.from_rationals(desc, 3, {1: F(1)})


def test_invert_series_requires_zero_constant():
    desc = RingDescriptor(n=2)
    h = QSeries.from_rationals(desc, 3, {0: F(1)})
    with pytest.raises(ValueError):
        invert_series(h)


def test_degree_zero_truncation_passes_through():
    J = j_reduced(5, 0)
    I = i_function(J, QUINTIC)
    for M in (small_mirror(I, bundle=QUINTIC), birkhoff(I, bundle=QUINTIC)):
        assert M.J_out == I
        assert M.F.coefficient(0).as_rational() == 1
        assert M.tau_of_q.is_zero()


def test_birkhoff_accepts_precomputed_frame():
    J = j_reduced(5, 3)
    I = i_function(J, QUINTIC)
    M1 = birkhoff(I, bundle=QUINTIC)
    M2 = birkhoff(I, frame=frame_series(I, 5), bundle=QUINTIC)
    assert M1.J_out == M2.J_out
    assert M1.tau_of_q == M2.tau_of_q


def test_birkhoff_rejects_bad_leading_slice():
    desc = RingDescriptor(n=3)
    f = ZSeries(desc, 2, {0: {0: CohElement.p_power(desc, 1)}})
    with pytest.raises(ValueError):
        birkhoff(f)
