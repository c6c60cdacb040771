""" necessary conditions for aligning the requested degrees of freedom """
import itertools
import logging
import typing

from coexist_ia import exc, metadata
from coexist_ia.bases import UserSpec

logger = logging.getLogger(__name__)

PAIRWISE = 'pairwise-dof'
SUBSET = 'subset-dof'
EQUAL_DOF = 'equal-dof-bound'
SINGLE_STREAM = 'single-stream-user-bound'


class Feasibility(typing.NamedTuple):
    feasible: bool
    condition: typing.Optional[str] = None
    reason: typing.Optional[str] = None

    def __bool__(self):
        return self.feasible


FEASIBLE = Feasibility(True)


def check_feasibility(n_sc: int, users: typing.Sequence[UserSpec]) -> Feasibility:
    """Return the first violated condition, or a feasible verdict.

    Equal-dof scenarios are judged by ``d (K + 1) <= 2 n_sc``, tightened to
    ``K <= 2 n_sc - 2`` when every user has one stream and ``K >= 3``.
    Otherwise the radar (or the user with the largest d when there is no
    radar) is the reference user ``R`` and every subset must satisfy
    ``d_R + d_i <= n_sc`` and ``2 d_R (n_sc - d_R) >= sum d_R d_i``.
    """
    users = list(users)
    if not users:
        raise exc.ConfigurationError('feasibility needs at least one user')
    if n_sc < 1:
        raise exc.ConfigurationError('n_sc must be >= 1, got %r' % n_sc)
    dofs = [user.d for user in users]
    k = len(users) - 1

    if len(set(dofs)) == 1:
        d = dofs[0]
        if d * (k + 1) > 2 * n_sc:
            return Feasibility(False, EQUAL_DOF, 'd=%d with %d users exceeds 2*n_sc=%d' % (d, k + 1, 2 * n_sc))
        if d == 1 and k >= 3 and k > 2 * n_sc - 2:
            return Feasibility(False, SINGLE_STREAM, 'K=%d exceeds 2*n_sc-2=%d' % (k, 2 * n_sc - 2))
        return FEASIBLE

    if len(users) > metadata.MAX_SUBSET_USERS:
        raise exc.ConfigurationError(
            'refusing subset enumeration for %d users (limit %d)' % (len(users), metadata.MAX_SUBSET_USERS))

    reference = next((user for user in users if user.is_radar), None)
    if reference is None:
        reference = max(users, key=lambda user: user.d)
    d_r = reference.d

    for user in users:
        if d_r + user.d > n_sc:
            return Feasibility(False, PAIRWISE, 'd_%s + d_%s = %d > n_sc=%d' % (
                reference.uid, user.uid, d_r + user.d, n_sc))

    budget = 2 * d_r * (n_sc - d_r)
    for size in range(len(users), 0, -1):
        for subset in itertools.combinations(users, size):
            demand = sum(d_r * user.d for user in subset)
            if budget - demand < 0:
                return Feasibility(False, SUBSET, 'users %s demand %d > %d' % (
                    ','.join(user.uid for user in subset), demand, budget))
    return FEASIBLE
