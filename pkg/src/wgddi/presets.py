"""Parameter sets for quantum dots next to a 10 nm Ag nanowire.

Guided plasmon wavelength 211.8 nm, transition wavelength 655 nm, dipoles
along -y, waveguide along +x.  Rates in units of Gamma0.
"""

from __future__ import annotations

from .core import ChainConfig, Emitter, validate_chain

# (gamma_wg, gamma_loss) for a dot 17 nm and 37 nm from the wire axis
NEAR = (11.03, 6.86)
FAR = (1.06, 1.26)


def _chain(*emitters: Emitter) -> ChainConfig:
    return validate_chain(ChainConfig(emitters=emitters))


def _row(n: int, gap: float) -> ChainConfig:
    return _chain(*(Emitter((j * gap, 17.0, 0.0), *NEAR) for j in range(n)))


PRESETS = {
    "fig2-close": lambda: _row(2, 32.75),
    "fig4-quarter": lambda: _row(2, 52.95),
    "fig4-half": lambda: _row(2, 105.9),
    "fig5-diag": lambda: _chain(
        Emitter((0.0, 17.0, 0.0), *NEAR), Emitter((20.0, 37.0, 0.0), *FAR)
    ),
    "fig5-stacked": lambda: _chain(
        Emitter((0.0, 17.0, 0.0), *NEAR), Emitter((0.0, 49.75, 0.0), 0.33, 1.12)
    ),
    "fig6-n5": lambda: _row(5, 32.75),
    "fig8-n5": lambda: _row(5, 32.75),
    "single-17nm": lambda: _chain(Emitter((0.0, 17.0, 0.0), *NEAR)),
    "single-37nm": lambda: _chain(Emitter((0.0, 37.0, 0.0), *FAR)),
}


def preset(name: str) -> ChainConfig:
    try:
        return PRESETS[name]()
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None
