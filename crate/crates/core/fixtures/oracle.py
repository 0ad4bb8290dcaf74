#!/usr/bin/env python3
"""Independent numpy oracle for the golden values in golden.json.

Shares no code with the Rust crate. Regenerate with

    python3 oracle.py > golden.json
"""
import itertools
import json
import math

import numpy as np


def fourier(d):
    w = np.exp(2j * np.pi / d)
    return np.array([[w ** (k * a) for a in range(d)] for k in range(d)]) / np.sqrt(d)


def hadamard(n):
    h = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
    m = np.array([[1.0]])
    for _ in range(n):
        m = np.kron(m, h)
    return m


def perm_apply(k, p):
    # k_pi[s] = k[pi^{-1}(s)]
    return tuple(k[p.index(s)] for s in range(len(k)))


def eta(F, t):
    """||P_E P_F P_E - P0|| restricted to the range of P_E, from explicit overlaps."""
    d = F.shape[0]
    labels = []
    for k in itertools.product(range(d), repeat=t):
        for l in sorted(set(itertools.permutations(k))):
            labels.append((k, l))
    K = np.array([x[0] for x in labels])
    L = np.array([x[1] for x in labels])
    n = len(labels)
    # U[i, j] = <k_i, l_i | alpha_j, beta_j> in the F basis, with (alpha_j, beta_j) in the same label set
    U = np.ones((n, n), dtype=complex)
    for s in range(t):
        U *= F[K[:, s]][:, K[:, s]] * np.conj(F[L[:, s]][:, L[:, s]])
    C = U @ U.conj().T
    perms = list(itertools.permutations(range(t)))
    gram = np.array([[sum(1 for k in itertools.product(range(d), repeat=t)
                          if perm_apply(k, p) == perm_apply(k, q)) / d ** t
                      for q in perms] for p in perms])
    gp = np.linalg.pinv(gram, rcond=1e-10)
    psi = np.zeros((n, len(perms)))
    for i, (k, l) in enumerate(labels):
        for j, p in enumerate(perms):
            if perm_apply(k, p) == l:
                psi[i, j] = d ** (-t / 2)
    p0 = psi @ gp @ psi.T
    return float(np.linalg.norm(C - p0, 2)), n


def rows_of(code, t, n):
    return [(code >> (n * (t - 1 - s))) & ((1 << n) - 1) for s in range(t)]


def restrict(row, subset, n):
    v = 0
    for p in subset:
        v = (v << 1) | ((row >> (n - p)) & 1)
    return v


def key(rows, fam, n):
    return tuple(tuple(sorted(restrict(r, I, n) for r in rows)) for I in fam)


def lambda_bucketed(t, n, fam):
    buckets = {}
    for code in range(1 << (t * n)):
        rows = rows_of(code, t, n)
        b = buckets.setdefault(key(rows, fam, n), {})
        c = tuple(sorted(rows))
        b[c] = b.get(c, 0) + 1
    total = 0
    for b in buckets.values():
        size = sum(b.values())
        total += size * size - sum(v * v for v in b.values())
    return total


def lambda_naive(t, n, fam):
    mats = [rows_of(c, t, n) for c in range(1 << (t * n))]
    keys = [key(m, fam, n) for m in mats]
    ms = [tuple(sorted(m)) for m in mats]
    total = 0
    for i in range(len(mats)):
        for j in range(len(mats)):
            if keys[i] == keys[j] and ms[i] != ms[j]:
                total += 1
    return total


def pairs(n):
    return [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]


def discrete_vs_continuous(t, n, a, b):
    """Max entrywise gap between the RDC_disc(I2:a,b) and RDC(I2) diagonal moments."""
    fam = pairs(n)
    worst = 0.0
    mats = [rows_of(c, t, n) for c in range(1 << (t * n))]

    def col(rows, i):
        return [(r >> (n - i)) & 1 for r in rows]

    for x in mats:
        for y in mats:
            cont = 1.0 if key(x, fam, n) == key(y, fam, n) else 0.0
            disc = 1.0
            for (i, j) in fam:
                xi, xj, yi, yj = col(x, i), col(x, j), col(y, i), col(y, j)
                n1 = sum(xi) - sum(yi)
                n2 = sum(xj) - sum(yj)
                n3 = sum(p & q for p, q in zip(xi, xj)) - sum(p & q for p, q in zip(yi, yj))
                if n1 % a or n2 % a or n3 % b:
                    disc = 0.0
                    break
            worst = max(worst, abs(cont - disc))
    return worst


def main():
    out = {}
    out["eta_pauli_n2_t2"] = eta(hadamard(2), 2)[0]
    out["eta_pauli_n3_t2"] = eta(hadamard(3), 2)[0]
    out["eta_pauli_n2_t3"] = eta(hadamard(2), 3)[0]
    out["eta_fourier_t2"] = {str(d): eta(fourier(d), 2)[0] for d in (8, 16, 32)}
    lam = {}
    for t, nmax in ((2, 4), (3, 4), (4, 4)):
        for n in range(2, nmax + 1):
            lam[f"{t},{n}"] = lambda_bucketed(t, n, pairs(n))
    out["lambda2"] = lam
    out["lambda2_naive_t4_n2"] = lambda_naive(4, 2, pairs(2))
    out["lemma7_probe_t2_n2"] = {
        "a_below": discrete_vs_continuous(2, 2, 2, 2),
        "b_below": discrete_vs_continuous(2, 2, 3, 1),
    }
    print(json.dumps(out, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
