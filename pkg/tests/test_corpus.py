from kgcode.core import Dyadic, geometric
from kgcode.corpus import CorpusSpec, run_checked
from kgcode.piclass import EnumeratedClass


def test_spec_shape():
    spec = CorpusSpec(size=12)
    classes = list(spec.classes())
    assert [s for s, _ in classes] == list(range(12))
    assert {spec.depth(k) for k in range(9)} == set(range(4, 13))
    assert {spec.stages(k) for k in range(4)} == {1, 2, 3, 4}
    for k, (_, cls) in enumerate(classes):
        assert cls.measure < Dyadic(3, 3)
        assert cls.max_len <= spec.depth(k)
        assert cls.complete_by <= spec.stages(k)


def test_spec_is_deterministic():
    a = [c.dumps() for _, c in CorpusSpec(size=5).classes()]
    b = [c.dumps() for _, c in CorpusSpec(size=5).classes()]
    assert a == b


def test_run_checked_golden():
    r = run_checked(0, geometric(2), EnumeratedClass.of([(1, "0000")]), dvls_goal=2)
    assert r.reached and not r.terminated and r.first_failure is None
    assert (r.stages, r.dvls) == (3, 2)
    assert r.kinds == {"Expansionary": 2, "Adaptive": 1}


def test_run_checked_cap():
    r = run_checked(0, geometric(2), EnumeratedClass(()), dvls_goal=5, cap=2)
    assert not r.reached and r.stages == 2
