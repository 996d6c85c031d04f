import doctest

import pytest

from prabhakar import certify, cli, combinatorics, distribution, specfun


@pytest.mark.parametrize("module", [specfun, combinatorics, distribution, certify, cli])
def test_module_doctests(module):
    result = doctest.testmod(module)
    assert result.failed == 0
