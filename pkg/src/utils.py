import re
from fractions import Fraction

family_mapping = {
    "min": "Min",
    "max": "Max",
    "product": "Product",
    "lukasiewicz": "Lukasiewicz",
    "drastic": "Drastic",
    "dual": "DualConorm",
    "uninorm-min": "UninormMinClass",
    "uninorm-max": "UninormMaxClass",
    "nullnorm": "Nullnorm",
    "example-2uninorm": "Example2Uninorm",
    "glued-2uninorm": "GluedTwoUninorm",
    "table": "Table",
    # Aliases
    "t-min": "Min",
    "s-max": "Max",
}

# Fraction literal validation: "7/10", "3", "0.25", ".5"
FRACTION_LITERAL_REGEX = r"^\s*(\d+\s*/\s*\d+|\d+(\.\d*)?|\.\d+)\s*$"

def is_valid_fraction_literal(text):
    """
    Validates a numeric literal using a regex pattern.
    Args:
        text (str): The literal to validate.
    Returns:
        bool: True if the literal is a fraction, integer or decimal, False otherwise.
    """
    if not text: # Ensure text is not None or empty before matching
        return False
    return bool(re.match(FRACTION_LITERAL_REGEX, text))

def parse_fraction(text):
    """
    Parses a numeric literal into an exact Fraction.

    Decimals are read as decimal fractions, so "0.7" becomes 7/10 and never
    passes through binary floating point.

    Args:
        text (str): The literal to parse.
    Returns:
        Fraction: The exact value.
    Raises:
        ValueError: If the literal is malformed or has a zero denominator.
    """
    if not is_valid_fraction_literal(text):
        raise ValueError(f"'{text}' is not a fraction, integer or decimal literal")
    cleaned = re.sub(r"\s+", "", text)
    if "/" in cleaned:
        num, den = cleaned.split("/")
        if int(den) == 0:
            raise ValueError(f"'{text}' has a zero denominator")
        return Fraction(int(num), int(den))
    return Fraction(cleaned)

def format_value(value):
    """
    Formats an exact value for reports.
    Args:
        value (Fraction | int): The value to format.
    Returns:
        str: A terminating decimal ("0.7", "1") when one exists, else "p/q".
    """
    value = Fraction(value)
    den = value.denominator
    for p in (2, 5):
        while den % p == 0:
            den //= p
    if den != 1:
        return f"{value.numerator}/{value.denominator}"
    if value.denominator == 1:
        return str(value.numerator)
    # Scale to the shortest power of ten that makes the value integral
    digits = 0
    scaled = value
    while scaled.denominator != 1:
        scaled *= 10
        digits += 1
    text = f"{scaled.numerator:0{digits + 1}d}"
    return f"{text[:-digits]}.{text[-digits:]}"
