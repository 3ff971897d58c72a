"""Independent reference implementations used by the tests.

Deliberately naive: plain Python loops, no shared code with the package.
"""

import itertools
import math


def gauss_solve(A, B):
    """Solve A X = B by Gaussian elimination with partial pivoting (lists of lists)."""
    n = len(A)
    m = len(B[0])
    M = [list(map(float, A[i])) + list(map(float, B[i])) for i in range(n)]
    for col in range(n):
        pivot = max(range(col, n), key=lambda r: abs(M[r][col]))
        M[col], M[pivot] = M[pivot], M[col]
        for r in range(col + 1, n):
            factor = M[r][col] / M[col][col]
            for c in range(col, n + m):
                M[r][c] -= factor * M[col][c]
    X = [[0.0] * m for _ in range(n)]
    for r in range(n - 1, -1, -1):
        for j in range(m):
            acc = M[r][n + j] - sum(M[r][c] * X[c][j] for c in range(r + 1, n))
            X[r][j] = acc / M[r][r]
    return X


def normal_equations(X, Y, ridge=0.0):
    """Least-squares W from (X^T X + ridge I) W = X^T Y."""
    n, d = len(X), len(X[0])
    k = len(Y[0])
    XtX = [[sum(X[r][i] * X[r][j] for r in range(n)) + (ridge if i == j else 0.0) for j in range(d)] for i in range(d)]
    XtY = [[sum(X[r][i] * Y[r][j] for r in range(n)) for j in range(k)] for i in range(d)]
    return gauss_solve(XtX, XtY)


def cosine(u, v):
    nu = math.sqrt(sum(a * a for a in u))
    nv = math.sqrt(sum(b * b for b in v))
    if nu == 0.0 or nv == 0.0:
        return -math.inf
    return sum(a * b for a, b in zip(u, v)) / (nu * nv)


def brute_nearest(query, words, vectors, exclude=()):
    """Double-loop cosine argmax; ties go to the smaller word."""
    best_word, best_score = None, -math.inf
    for word, vec in zip(words, vectors):
        if word in exclude:
            continue
        score = cosine(query, vec)
        if score == -math.inf:
            continue
        if best_word is None or score > best_score or (score == best_score and word < best_word):
            best_word, best_score = word, score
    return best_word, best_score


def brute_p_at_1(src_words, src_vectors, tgt_words, tgt_vectors, gold):
    src = dict(zip(src_words, src_vectors))
    tgt_set = set(tgt_words)
    hits = evaluated = skipped = 0
    for word, targets in gold.items():
        reachable = {t for t in targets if t in tgt_set}
        if word not in src or not reachable:
            skipped += 1
            continue
        evaluated += 1
        got, _ = brute_nearest(src[word], tgt_words, tgt_vectors)
        hits += got in reachable
    return (hits / evaluated if evaluated else 0.0), evaluated, skipped


def brute_viterbi(emissions, transitions):
    """Best path by enumeration.

    ``emissions[t][y]`` scores label ``y`` at position ``t``; ``transitions`` is
    an (L+1) x (L+1) table whose last row is the start state and last column
    the stop state.  Ties go to the lexicographically smallest index tuple.
    """
    T = len(emissions)
    L = len(emissions[0])
    start, stop = L, L
    best, best_score = None, -math.inf
    for path in itertools.product(range(L), repeat=T):
        score = transitions[start][path[0]] + emissions[0][path[0]]
        for t in range(1, T):
            score += transitions[path[t - 1]][path[t]] + emissions[t][path[t]]
        score += transitions[path[-1]][stop]
        if score > best_score:
            best, best_score = path, score
    return list(best), best_score
