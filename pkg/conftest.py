import pytest

from modelspec.specs import build_power_law


@pytest.fixture(scope="session")
def smga():
    """g(s) = s, h(r) = r, f(s, r) = s r."""
    return build_power_law(1, 1, "product")


@pytest.fixture(scope="session")
def monod_model():
    return build_power_law(1, 1, "monod", k=1.0)


@pytest.fixture(scope="session")
def smga_threshold(django_db_blocker):
    """Threshold search on the reference model, shared by the slow tests of a worker."""
    from shooting.threshold import find_threshold

    with django_db_blocker.unblock():
        return find_threshold(build_power_law(1, 1, "product"))


@pytest.fixture(scope="session")
def smga_refined(smga, smga_threshold, django_db_blocker):
    from shooting.threshold import refine_threshold

    with django_db_blocker.unblock():
        return refine_threshold(smga, smga_threshold)


@pytest.fixture(scope="session")
def smga_sharp_shot(smga, smga_refined):
    """Shot at the admissible end of the refined bracket, used for tail and edge checks."""
    from shooting.threshold import threshold_shot

    return threshold_shot(smga, smga_refined)
