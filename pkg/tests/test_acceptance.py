"""Acceptance gate: every exit criterion at its stated tolerance.

Each test prints one summary line so a verbose run reads as a checklist.
Scales stay at desk size (modes <= 12 before spin, N <= 4, 2s <= 3) and each
criterion runs in well under a minute.
"""

import json
from itertools import permutations, product

import numpy as np

from helpers import random_state, state_coordinate_tensor
from spinstat.cli import main
from spinstat.correlations import pair_correlation, relative_parity_spectrum
from spinstat.fockspace import (
    bracket_state,
    build_basis,
    identity_matrix,
    matrix_of,
    max_abs,
    overlap,
    overlap_oracle,
    perm_parity,
    project_onto_symmetric,
    symmetrizer_oracle,
)
from spinstat.hamiltonians import (
    OneBodySpec,
    TwoBodySpec,
    build_many_body,
    diagonalize,
    ideal_gas_check,
    mode_operator_check,
)
from spinstat.modes import Lattice, ModeSpace, SpinQuantum
from spinstat.opalgebra import create, destroy, sigma_commutator
from spinstat.symmetry import (
    origin_vanishing_check,
    pi_eigenvalue_check,
    rotation_by_steps,
    rotation_covariance_check,
    rotation_element_residual,
    theorem_report,
)

SEED = 42


def report(line: str) -> None:
    print(f"ACCEPTANCE {line}")


def test_criterion_1_commutator_suite():
    """Matrix forms of the graded field-operator relations on ring(4), s=1/2."""
    tol = 1e-12
    space = ModeSpace(Lattice.ring(4), SpinQuantum(1))
    worst = 0.0
    for sigma in (1, -1):
        bases = [build_basis(space, n, sigma) for n in range(4)]
        for a in space.modes:
            for b in space.modes:
                mixed = sigma_commutator(destroy(a, sigma), create(b, sigma))
                ann = sigma_commutator(destroy(a, sigma), destroy(b, sigma))
                cre = sigma_commutator(create(a, sigma), create(b, sigma))
                delta = 1.0 if a == b else 0.0
                for basis in bases:
                    m = matrix_of(mixed, basis, basis).matrix
                    worst = max(worst, max_abs(m - delta * identity_matrix(basis).matrix))
                    if basis.n_particles >= 2:
                        down = build_basis(space, basis.n_particles - 2, sigma)
                        worst = max(worst, max_abs(matrix_of(ann, basis, down).matrix))
                    up = build_basis(space, basis.n_particles + 2, sigma)
                    worst = max(worst, max_abs(matrix_of(cre, basis, up).matrix))
    assert worst <= tol
    report(f"1 commutator suite: residual {worst:.2e} <= {tol} PASS")


def test_criterion_2_orthonormality_oracle():
    """Bracket overlaps equal the permanent/determinant oracle on 6 modes."""
    tol = 1e-12
    space = ModeSpace(Lattice.ring(6), SpinQuantum(0))
    worst = 0.0
    for sigma in (1, -1):
        vectors = {}
        for n in range(4):
            for coords in product(space.modes, repeat=n):
                vectors[coords] = bracket_state(space, coords, sigma).amplitudes
        for n in range(4):
            tuples = list(product(space.modes, repeat=n))
            for bra in tuples:
                vb = vectors[bra]
                for ket in tuples:
                    got = complex(np.vdot(vb, vectors[ket]))
                    want = overlap_oracle(bra, ket, sigma)
                    worst = max(worst, abs(got - want))
        # mixed particle numbers: the delta_{N'N} factor forces exact zero
        for n_bra, n_ket in ((0, 1), (1, 2), (2, 3), (3, 1)):
            bra = tuple(space.modes[:n_bra])
            ket = tuple(space.modes[:n_ket])
            got = overlap(space, bra, ket, sigma)
            assert got == overlap_oracle(bra, ket, sigma) == 0
    assert worst <= tol
    report(f"2 orthonormality: residual {worst:.2e} <= {tol} PASS")


def test_criterion_3_completeness_projector():
    """Bracket-resolution projector == first-quantized symmetrizer, idempotent."""
    tol = 1e-12
    space = ModeSpace(Lattice.ring(4), SpinQuantum(1))
    rng = np.random.default_rng(SEED)
    n = 2
    shape = (space.n_modes,) * n
    worst = worst_idem = 0.0
    for sigma in (1, -1):
        for _ in range(100):
            probe = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
            projected = project_onto_symmetric(space, n, sigma, probe)
            worst = max(worst, float(np.max(np.abs(projected - symmetrizer_oracle(probe, sigma)))))
            again = project_onto_symmetric(space, n, sigma, projected)
            worst_idem = max(worst_idem, float(np.max(np.abs(again - projected))))
    assert worst <= tol and worst_idem <= tol
    report(f"3 completeness: oracle residual {worst:.2e}, idempotence {worst_idem:.2e} <= {tol} PASS")


def test_criterion_4_permutation_eigenvalues():
    """Bracket states transform with sigma^P for every permutation, N <= 4."""
    tol = 1e-12
    space = ModeSpace(Lattice.ring(2), SpinQuantum(1))
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for sigma in (1, -1):
        for n in (2, 3, 4):
            pools = [
                tuple(space.mode_at(int(i)) for i in rng.integers(0, space.n_modes, size=n)),
                tuple(space.mode_at(i % space.n_modes) for i in range(n)),
                tuple(space.mode_at(0) for _ in range(n)),
            ]
            for coords in pools:
                base = bracket_state(space, coords, sigma)
                for perm in permutations(range(n)):
                    factor = 1.0 if perm_parity(perm) == 1 else float(sigma)
                    permuted = bracket_state(space, tuple(coords[p] for p in perm), sigma)
                    dev = permuted.amplitudes - factor * base.amplitudes
                    worst = max(worst, float(np.max(np.abs(dev))))
    assert worst <= tol
    report(f"4 permutation eigenvalues: residual {worst:.2e} <= {tol} PASS")


def test_criterion_5_ideal_gas():
    """ED spectra equal occupancy multisets; eigenmode ladder relations hold."""
    spectral_tol, mode_tol = 1e-9, 1e-10
    cases = [
        (Lattice.ring(4), SpinQuantum(1)),
        (Lattice.grid2d(3), SpinQuantum(0)),
    ]
    spec = OneBodySpec(hop_t=1.0)
    worst_spectral = 0.0
    for lattice, spin in cases:
        for sigma in (1, -1):
            for n in (1, 2, 3):
                rep = ideal_gas_check(spec, lattice, spin, n, sigma, tol=spectral_tol)
                assert rep.spectra_match
                worst_spectral = max(
                    worst_spectral, rep.spectral_deviation, rep.h0_identity_residual
                )
    worst_modes = max(
        mode_operator_check(spec, Lattice.ring(4), SpinQuantum(1), sigma, n_max=3)
        for sigma in (1, -1)
    )
    assert worst_spectral <= spectral_tol
    assert worst_modes <= mode_tol
    report(
        f"5 ideal gas: spectral residual {worst_spectral:.2e} <= {spectral_tol},"
        f" mode relations {worst_modes:.2e} <= {mode_tol} PASS"
    )


def test_criterion_6_rotation_covariance():
    """Field-transform element identity and pair covariance for all steps, 2s <= 3."""
    tol = 1e-12
    lattice = Lattice.ring(4)
    worst_elem = worst_cov = 0.0
    for twos_s in (0, 1, 2, 3):
        space = ModeSpace(lattice, SpinQuantum(twos_s))
        for sigma in (1, -1):
            for steps in range(lattice.steps_per_turn):
                rot = rotation_by_steps(space, steps)
                worst_elem = max(
                    worst_elem, rotation_element_residual(space, rot, sigma, n_max=2)
                )
                for tm in space.spin.projections():
                    for site in (0, 1):
                        worst_cov = max(
                            worst_cov,
                            rotation_covariance_check(
                                space, tm, site, rot.turns, sigma, n_max=3
                            ),
                        )
    assert worst_elem <= tol and worst_cov <= tol
    report(
        f"6 rotation covariance: element {worst_elem:.2e}, pair {worst_cov:.2e} <= {tol} PASS"
    )


def test_criterion_7_spin_statistics_core():
    """Half-turn eigenvalue, origin vanishing, winding integers, verdicts."""
    tol = 1e-12
    lattice = Lattice.ring(8)
    verdicts = {}
    for twos_s in (0, 1, 2, 3):
        space = ModeSpace(lattice, SpinQuantum(twos_s))
        rep = theorem_report(space, n_max=2)
        verdicts[twos_s] = rep.verdict_sigma
        for sigma, verdict in rep.per_sigma.items():
            expected_lambda = float((-1) ** twos_s * sigma)
            assert abs(verdict.lambda_measured - expected_lambda) <= tol
            assert verdict.lambda_residual <= tol
            assert verdict.origin_vanishes == (sigma == -1)
            for tm, winding in verdict.winding_by_twos_ms.items():
                assert winding == tm
            assert verdict.winding_residual <= 1e-9
        # determinate origin eigenvalue only for the bosonic grade
        probe = 0
        for sigma in (1, -1):
            res = pi_eigenvalue_check(space, space.spin.projections()[0], probe, sigma, 2)
            assert res.determinate
            assert abs(res.lambda_measured - res.lambda_expected) <= tol
            assert origin_vanishing_check(space, space.spin.projections()[0], sigma, 2) == (
                sigma == -1
            )
    assert verdicts == {0: 1, 1: -1, 2: 1, 3: -1}
    report(f"7 spin-statistics core: verdicts {verdicts} PASS")


def test_criterion_8_correlations():
    """Pair correlation equals the first-quantized oracle; parity selection rule."""
    tol = 1e-12
    rng = np.random.default_rng(SEED)
    # brute-force oracle comparison up to N = 4 on 4 modes
    space = ModeSpace(Lattice.ring(2), SpinQuantum(1))
    worst = 0.0
    for sigma in (1, -1):
        for n in (2, 3, 4):
            basis = build_basis(space, n, sigma)
            if basis.dim == 0:
                continue
            state = random_state(basis, rng)
            tensor = state_coordinate_tensor(state)
            table = tensor.reshape(space.n_modes, space.n_modes, -1).sum(axis=2)
            for i, x in enumerate(space.modes):
                for j, y in enumerate(space.modes):
                    got = pair_correlation(state, x, y)
                    worst = max(worst, abs(got - table[i, j]))
    assert worst <= tol

    # interacting ground states on ring(8) with a contact interaction
    bose = ModeSpace(Lattice.ring(8), SpinQuantum(0))
    basis = build_basis(bose, 2, 1)
    ground = diagonalize(
        build_many_body(OneBodySpec(hop_t=1.0), TwoBodySpec.contact(-2.0), basis)
    ).eigenvectors[0]
    spectrum = relative_parity_spectrum(ground, 0)
    assert max(abs(spectrum[l]) for l in range(1, 8, 2)) <= tol
    assert max(abs(spectrum[l]) for l in range(0, 8, 2)) > 1e-3

    fermi = ModeSpace(Lattice.ring(8), SpinQuantum(1))
    fbasis = build_basis(fermi, 2, -1)
    fground = diagonalize(
        build_many_body(OneBodySpec(hop_t=1.0), TwoBodySpec.contact(-2.0), fbasis)
    ).eigenvectors[0]
    fspectrum = relative_parity_spectrum(fground, 1)
    assert max(abs(fspectrum[l]) for l in range(0, 8, 2)) <= tol

    # nearest-neighbour attraction makes the fermionic rule non-vacuous
    spinless = ModeSpace(Lattice.ring(8), SpinQuantum(0))
    sbasis = build_basis(spinless, 2, -1)
    sground = diagonalize(
        build_many_body(OneBodySpec(hop_t=1.0), TwoBodySpec.from_dict({1: -2.0}), sbasis)
    ).eigenvectors[0]
    sspectrum = relative_parity_spectrum(sground, 0)
    assert max(abs(sspectrum[l]) for l in range(0, 8, 2)) <= tol
    assert max(abs(sspectrum[l]) for l in range(1, 8, 2)) > 1e-3
    report(f"8 correlations: oracle residual {worst:.2e} <= {tol}, selection rules PASS")


def test_criterion_9_cli_determinism(tmp_path):
    """Byte-identical reruns and the documented exit-code contract."""
    cfg_base = {
        "lattice": {"kind": "ring", "M": 4},
        "twos_s": 1,
        "sigma": "both",
        "N": 2,
        "n_max": 2,
        "seed": SEED,
        "suites": ["commutators", "completeness", "theorem"],
    }
    snapshots = []
    for tag in ("first", "second"):
        out = tmp_path / tag
        path = tmp_path / f"{tag}.json"
        path.write_text(json.dumps(dict(cfg_base, out=str(out))))
        assert main(["verify", "--config", str(path)]) == 0
        snapshots.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    assert snapshots[0] == snapshots[1]

    # exit-code contract on induced failures
    assert main([
        "verify", "--suite", "completeness", "--lattice", "ring:2", "--twos-s", "0",
        "--tol", "1e-300", "--out", str(tmp_path / "fail"),
    ]) == 1
    assert main([
        "verify", "--suite", "theorem", "--lattice", "ring:3", "--out", str(tmp_path / "odd"),
    ]) == 2
    assert main([
        "correlate", "--lattice", "ring:4", "--twos-s", "0", "--sigma", "-1",
        "-N", "2", "--state-index", "99", "--out", str(tmp_path / "idx"),
    ]) == 2
    report("9 CLI determinism and exit codes: PASS")
