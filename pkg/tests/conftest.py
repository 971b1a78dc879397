import pytest

from homfill.backends import ExtensionBackend, FreeAbelianBackend, FreeBackend
from homfill.cayley import build_ball
from homfill.presentation import (
    AutLift,
    HomPresentation,
    Presentation,
    build_extension_presentation,
)
from homfill.words import parse_word

Z2_NAMES = {"a": 0, "b": 1}


def z2_presentation() -> HomPresentation:
    return HomPresentation.mark_all(
        Presentation(("a", "b"), (parse_word("a b a' b'", Z2_NAMES),))
    )


@pytest.fixture(scope="session")
def z2_pres():
    return z2_presentation()


@pytest.fixture(scope="session")
def z2_backend():
    return FreeAbelianBackend(2)


@pytest.fixture(scope="session")
def z2_ball4(z2_backend, z2_pres):
    return build_ball(z2_backend, z2_pres, 4)


@pytest.fixture(scope="session")
def z2_ball5(z2_backend, z2_pres):
    return build_ball(z2_backend, z2_pres, 5)


@pytest.fixture(scope="session")
def f2_pres():
    return HomPresentation.mark_all(Presentation(("a", "b"), ()))


@pytest.fixture(scope="session")
def f2_backend():
    return FreeBackend(2)


@pytest.fixture(scope="session")
def f2_ball3(f2_backend, f2_pres):
    return build_ball(f2_backend, f2_pres, 3)


def f2_triangle_presentation():
    names = {"a": 0, "b": 1, "c": 2}
    return HomPresentation.mark_all(
        Presentation(("a", "b", "c"), (parse_word("c' a b", names),))
    )


@pytest.fixture(scope="session")
def f2tri_pres():
    return f2_triangle_presentation()


@pytest.fixture(scope="session")
def f2tri_backend():
    return FreeBackend(3, {2: (1, 2)}, base_rank=2)


@pytest.fixture(scope="session")
def f2tri_ball4(f2tri_backend, f2tri_pres):
    return build_ball(f2tri_backend, f2tri_pres, 4)


def identity_lift() -> AutLift:
    return AutLift.identity(2)


def shear_lift() -> AutLift:
    # a -> ab, b -> b with inverse a -> ab', b -> b
    return AutLift(((1, 2), (2,)), ((1, -2), (2,)), 0)


class ExtensionSetup:
    def __init__(self, lift: AutLift, h_radius: int, k_radius: int):
        self.k_pres = z2_presentation()
        self.k_backend = FreeAbelianBackend(2)
        self.lift = lift
        self.h_pres, self.layout = build_extension_presentation(
            self.k_pres, [lift], k_normal_form=self.k_backend.normal_form
        )
        self.h_backend = ExtensionBackend(self.k_backend, [lift])
        self.k_ball = build_ball(self.k_backend, self.k_pres, k_radius)
        self.h_ball = build_ball(self.h_backend, self.h_pres, h_radius)

    def constants(self):
        from homfill.extension import compute_constants

        return compute_constants(
            self.k_ball, self.layout, [self.lift], self.h_pres.base.relators
        )


@pytest.fixture(scope="session")
def z3_setup():
    return ExtensionSetup(identity_lift(), h_radius=7, k_radius=8)


@pytest.fixture(scope="session")
def heis_setup():
    return ExtensionSetup(shear_lift(), h_radius=7, k_radius=10)


@pytest.fixture(scope="session")
def z3_constants(z3_setup):
    return z3_setup.constants()


@pytest.fixture(scope="session")
def heis_constants(heis_setup):
    return heis_setup.constants()
