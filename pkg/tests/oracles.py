"""Independent brute-force reimplementations used as test oracles.

Nothing here imports the grid index or union-find; connectivity is plain
breadth-first search over all O(n^2) pairs with scalar arithmetic.
"""

import math
from collections import deque


def dist(a, b):
    return math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b)))


def bfs_component(centers, radii, start):
    n = len(radii)
    seen = set(start)
    queue = deque(start)
    while queue:
        i = queue.popleft()
        for j in range(n):
            if j not in seen and dist(centers[i], centers[j]) < radii[i] + radii[j]:
                seen.add(j)
                queue.append(j)
    return sorted(seen)


def brute_origin_cluster(centers, radii):
    origin = [0.0] * len(centers[0]) if len(centers) else []
    start = [i for i in range(len(radii)) if dist(centers[i], origin) < radii[i]]
    return bfs_component(centers, radii, start) if start else []


def brute_stats(centers, radii, L):
    members = brute_origin_cluster(centers, radii)
    if not members:
        return dict(covered=False, N=0, D=0.0, M=0.0, boundary_hit=False)
    origin = [0.0] * len(centers[0])
    D = max(dist(centers[i], centers[j]) + radii[i] + radii[j] for i in members for j in members)
    M = max(dist(centers[i], origin) + radii[i] for i in members)
    hit = any(max(abs(v) for v in centers[i]) + radii[i] > L for i in members)
    return dict(covered=True, N=len(members), D=D, M=M, boundary_hit=hit)


def brute_G(centers, radii, x, alpha):
    keep = [i for i in range(len(radii)) if dist(centers[i], x) < 10 * alpha]
    cs = [centers[i] for i in keep] + [list(x)]
    rs = [radii[i] for i in keep] + [alpha]
    comp = bfs_component(cs, rs, [len(rs) - 1])
    return any(dist(cs[i], x) + rs[i] >= 8 * alpha for i in comp)


def brute_H(centers, radii, alpha):
    o = [0.0] * len(centers[0]) if len(centers) else []
    return any(dist(c, o) >= 10 * alpha and dist(c, o) < r + 9 * alpha for c, r in zip(centers, radii))


def hill_direct(samples, k):
    xs = sorted(samples, reverse=True)
    return k / sum(math.log(xs[i] / xs[k]) for i in range(k))
