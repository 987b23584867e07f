from fractions import Fraction
from typing import Sequence

from affine_compact.core.models import AffineFunctional, AffineModel, JumpChannel, JumpKernel, StateSpace
from affine_compact.core.validation import validate_model
from affine_compact.errors import MalformedRateMatrix, SchemaError
from affine_compact.utilities.linalg import to_fraction


def embed_markov_chain(Q: Sequence[Sequence], name: str | None = None) -> AffineModel:
    """
    View a finite-state Markov chain with rate matrix Q as an affine process.

    State i becomes the unit vector e_i in Z^n and the pair (i, j) becomes the
    jump e_j - e_i with intensity q_ij * x_i. Pairs with q_ij = 0 contribute no
    channel. The states span the hyperplane sum(x) = 1 only, so the model is
    flagged ``full_span=False``.
    """
    try:
        rates = [[to_fraction(v) for v in row] for row in Q]
    except SchemaError as e:
        raise MalformedRateMatrix(f"Rate matrix entries must be exact rationals: {e.message}") from e
    n = len(rates)
    if n == 0 or any(len(row) != n for row in rates):
        raise MalformedRateMatrix("Rate matrix must be square and nonempty", shape=[len(r) for r in rates])
    for i, row in enumerate(rates):
        for j, q in enumerate(row):
            if i != j and q < 0:
                raise MalformedRateMatrix(f"Negative off-diagonal rate q[{i}][{j}] = {q}", i=i, j=j)
        if sum(row, Fraction(0)) != 0:
            raise MalformedRateMatrix(f"Row {i} of the rate matrix does not sum to zero", row=i)

    unit = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    channels = []
    for i in range(n):
        for j in range(n):
            if i == j or rates[i][j] == 0:
                continue
            jump = tuple(b - a for a, b in zip(unit[i], unit[j]))
            channels.append(JumpChannel(jump, AffineFunctional.coordinate(n, i, scale=rates[i][j])))
    model = AffineModel(StateSpace(n, tuple(unit)), JumpKernel(tuple(channels)), full_span=False,
                        name=name or f"markov-chain-{n}")
    validate_model(model)
    return model
