"""Regenerates golden_ee_delta0.5_n0.csv with an independent numpy evolution.

Builds the rotating-frame Hamiltonian on atoms x Fock(0..n+6) with Kronecker
products, diagonalizes it with numpy.linalg.eigh, traces out the field and
takes the partial transpose by index reshuffling.
"""
import numpy as np

DELTA, N, TAU_MAX, STEPS = 0.5, 0, 10.0, 1001


def hamiltonian(delta, cutoff):
    f = cutoff + 1
    a = np.diag(np.sqrt(np.arange(1, f)), 1)
    lower = np.array([[0, 0], [1, 0]])  # basis (e, g): |g><e|
    pe = np.diag([1, 0])
    i2, i_f = np.eye(2), np.eye(f)
    h = delta * (np.kron(np.kron(pe, i2), i_f) + np.kron(np.kron(i2, pe), i_f) - np.eye(4 * f))
    for s in (np.kron(lower, i2), np.kron(i2, lower)):
        t = np.kron(s, a.T)
        h = h + t + t.T
    return h


def main():
    cutoff = N + 6
    f = cutoff + 1
    w, v = np.linalg.eigh(hamiltonian(DELTA, cutoff))
    psi0 = np.zeros(4 * f, complex)
    psi0[0 * f + N] = 1.0
    c = v.conj().T @ psi0
    print("tau,p_ee,p_eg,p_ge,p_gg,negativity")
    for k in range(STEPS):
        tau = TAU_MAX if k == STEPS - 1 else k * TAU_MAX / (STEPS - 1)
        psi = v @ (np.exp(-1j * w * tau) * c)
        m = psi.reshape(4, f)
        rho = m @ m.conj().T
        pt = rho.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)
        neg = np.abs(np.linalg.eigvalsh(pt)).sum() - 1.0
        p = np.real(np.diag(rho))
        print(",".join(f"{x:.15e}" for x in [tau, *p, neg]))


if __name__ == "__main__":
    main()
