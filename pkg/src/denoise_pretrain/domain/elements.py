""" denoise_pretrain.domain.elements

    periodic table lookups: symbol <-> atomic number for Z in [1, 118]

"""

from __future__ import annotations

from denoise_pretrain.errors import ContractViolation

N_ELEMENTS = 118

SYMBOLS: tuple[str, ...] = (
    "H", "He",
    "Li", "Be", "B", "C", "N", "O", "F", "Ne",
    "Na", "Mg", "Al", "Si", "P", "S", "Cl", "Ar",
    "K", "Ca", "Sc", "Ti", "V", "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn",
    "Ga", "Ge", "As", "Se", "Br", "Kr",
    "Rb", "Sr", "Y", "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd",
    "In", "Sn", "Sb", "Te", "I", "Xe",
    "Cs", "Ba",
    "La", "Ce", "Pr", "Nd", "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu",
    "Hf", "Ta", "W", "Re", "Os", "Ir", "Pt", "Au", "Hg",
    "Tl", "Pb", "Bi", "Po", "At", "Rn",
    "Fr", "Ra",
    "Ac", "Th", "Pa", "U", "Np", "Pu", "Am", "Cm", "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr",
    "Rf", "Db", "Sg", "Bh", "Hs", "Mt", "Ds", "Rg", "Cn",
    "Nh", "Fl", "Mc", "Lv", "Ts", "Og",
)

_NUMBER_OF: dict[str, int] = {symbol: z for z, symbol in enumerate(SYMBOLS, start=1)}


def atomic_number(symbol: str) -> int:
    """ 'C' -> 6; also accepts 'c', 'CL' and bare atomic numbers like '6' """
    token = symbol.strip()
    if token.isdigit():
        z = int(token)
        check_atomic_number(z)
        return z
    z = _NUMBER_OF.get(token.capitalize())
    if z is None:
        raise ContractViolation(f"unknown element symbol: {symbol!r}")
    return z


def symbol_of(z: int) -> str:
    check_atomic_number(z)
    return SYMBOLS[z - 1]


def check_atomic_number(z: int) -> None:
    if not 1 <= int(z) <= N_ELEMENTS:
        raise ContractViolation(f"atomic number {z} outside [1, {N_ELEMENTS}]")
