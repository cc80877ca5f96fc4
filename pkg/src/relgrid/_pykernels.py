"""Pure-Python kernels. Reference behaviour for the compiled ``_ckernels`` module.

Object arrays are passed as ``bytes`` (one byte per object). The relation matrix
is ``bytes`` of length n*n where cell ``i*n+j`` holds the bitmask of relations
``i REL j`` (bit order follows :data:`relgrid.domain.RELATIONS`).
"""

SAME_ROW, SAME_COLUMN, SAME_COLOR, SAME_SHAPE, SAME_SIZE, INSIDE_OF = (1 << i for i in range(6))


def relation_matrix(rows, cols, colors, shapes, sizes, boxes) -> bytes:
    n = len(rows)
    out = bytearray(n * n)
    for i in range(n):
        bi = boxes[i]
        for j in range(n):
            if i == j:
                continue
            bj = boxes[j]
            m = 0
            if not bi and not bj:
                if rows[i] == rows[j]:
                    m |= SAME_ROW
                if cols[i] == cols[j]:
                    m |= SAME_COLUMN
            if colors[i] == colors[j]:
                m |= SAME_COLOR
            if shapes[i] == shapes[j]:
                m |= SAME_SHAPE
            if sizes[i] == sizes[j]:
                m |= SAME_SIZE
            if bj and not bi:
                s = sizes[j]
                if rows[j] <= rows[i] < rows[j] + s and cols[j] <= cols[i] < cols[j] + s:
                    m |= INSIDE_OF
            out[i * n + j] = m
    return bytes(out)


def _extend(i, k, n, rel, cand, parent, ebit, assign, used):
    if i == k:
        return True
    p = assign[parent[i]] * n
    bit = ebit[i]
    m = cand[i] & ~used
    while m:
        low = m & -m
        x = low.bit_length() - 1
        m ^= low
        if rel[p + x] & bit:
            assign[i] = x
            if _extend(i + 1, k, n, rel, cand, parent, ebit, assign, used | low):
                return True
    return False


def embed_roots(n, rel, cand, parent, ebit) -> int:
    """Bitmask of world nodes that can host the root of an injective tree embedding.

    ``cand[i]`` is the bitmask of world nodes satisfying command node ``i``'s
    predicate; command nodes come in preorder with ``parent[i] < i`` and
    ``ebit[i]`` the relation bit required on edge ``parent[i] -> i``.
    """
    k = len(cand)
    assign = [0] * k
    roots = 0
    m = cand[0]
    while m:
        low = m & -m
        m ^= low
        assign[0] = low.bit_length() - 1
        if _extend(1, k, n, rel, cand, parent, ebit, assign, low):
            roots |= low
    return roots


def find_witness(n, rel, cand, parent, ebit, root):
    """One embedding (tuple of world indices per command node) with ``root`` as the image of node 0."""
    k = len(cand)
    if not (cand[0] >> root) & 1:
        return None
    assign = [0] * k
    assign[0] = root
    if _extend(1, k, n, rel, cand, parent, ebit, assign, 1 << root):
        return tuple(assign)
    return None
