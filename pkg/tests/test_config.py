import unittest
from fractions import Fraction

from src.config import parse_config
from src.errors import ParseError, ValidationError
from src.grid_domain import Mode
from src.operators import DualConorm, Example2Uninorm, Min, Table, discretize

EXAMPLE = """
[run]
grid = 20
command = sweep

[operator U1]
family = example-2uninorm, e = 0.2, a = 0.6, f = 0.8

[operator U2]
family = example-2uninorm
e = 3/10, a = 0.5, f = 0.7

[params]
u1 = U1, u2 = U2
"""


class TestParseConfig(unittest.TestCase):

    def test_example_stanza(self):
        """Test that the example stanza builds an Example2Uninorm on the grid n=20."""
        cfg = parse_config(EXAMPLE)
        self.assertEqual(cfg.grid.n, 20)
        self.assertEqual(cfg.command, "sweep")
        spec = cfg.operators["U1"]
        self.assertIsInstance(spec, Example2Uninorm)
        self.assertEqual((spec.e.value, spec.a.value, spec.f.value), (Fraction(1, 5), Fraction(3, 5), Fraction(4, 5)))
        self.assertEqual(cfg.operators["U2"].e.index, 6)
        self.assertEqual(cfg.operator("u2")[0], "U2")

    def test_min_stanza(self):
        """Test that family=min builds Min."""
        cfg = parse_config("[operator M]\nfamily = min\n")
        self.assertEqual(cfg.operators["M"], Min())
        self.assertEqual(cfg.grid.n, 10)
        self.assertEqual(cfg.output_format, "human")

    def test_off_grid_parameter(self):
        """Test that e=0.25 is rejected on the grid n=10 with its line number."""
        text = "[run]\ngrid = 10\n[operator U]\nfamily = example-2uninorm, e = 0.25, a = 0.5, f = 0.7\n"
        with self.assertRaises(ValidationError) as context:
            parse_config(text)
        self.assertIn("line 4", str(context.exception))
        self.assertIn("not on the grid", str(context.exception))
        self.assertEqual(context.exception.line, 4)

    def test_float_mode_tolerance(self):
        """Test that float mode snaps a near-grid parameter."""
        text = "[run]\ngrid = 10, mode = float, eps = 1e-6\n[operator U]\nfamily = example-2uninorm, e = 0.2000000001, a = 0.5, f = 0.7\n"
        cfg = parse_config(text)
        self.assertIs(cfg.tolerance.mode, Mode.FLOAT)
        self.assertEqual(cfg.operators["U"].e.index, 2)

    def test_cli_overrides(self):
        """Test that CLI values win over the [run] section."""
        cfg = parse_config(EXAMPLE.replace("grid = 20", "grid = 10"), grid_override=20, command_override="migrative")
        self.assertEqual(cfg.grid.n, 20)
        self.assertEqual(cfg.command, "migrative")

    def test_duplicate_operator(self):
        """Test that a name defined twice is rejected."""
        text = "[operator A]\nfamily = min\n[operator A]\nfamily = max\n"
        with self.assertRaises(ValidationError) as context:
            parse_config(text)
        self.assertIn("duplicate operator name 'A'", str(context.exception))
        self.assertEqual(context.exception.line, 3)

    def test_dangling_reference(self):
        """Test that a reference to an undefined operator is rejected."""
        with self.assertRaises(ValidationError) as context:
            parse_config("[operator S]\nfamily = dual, inner = T9\n")
        self.assertIn("undefined operator 'T9'", str(context.exception))

    def test_dangling_param(self):
        """Test that [params] must name defined operators."""
        with self.assertRaises(ValidationError) as context:
            parse_config("[operator A]\nfamily = min\n[params]\nu1 = B\n")
        self.assertIn("undefined operator 'B'", str(context.exception))

    def test_reference_cycle(self):
        """Test that operators referring to each other are rejected."""
        text = "[operator A]\nfamily = dual, inner = B\n[operator B]\nfamily = dual, inner = A\n"
        with self.assertRaises(ValidationError) as context:
            parse_config(text)
        self.assertIn("cycle", str(context.exception))

    def test_references(self):
        """Test nested references and parameterless family names."""
        text = "[operator S]\nfamily = dual, inner = lukasiewicz\n[operator U]\nfamily = uninorm-min, e = 0.5, t = min, s = S\n"
        cfg = parse_config(text)
        self.assertIsInstance(cfg.operators["S"], DualConorm)
        self.assertIs(cfg.operators["U"].s, cfg.operators["S"])

    def test_table_family(self):
        """Test that a table stanza reads its rows exactly."""
        text = "[run]\ngrid = 2\n[operator T]\nfamily = table\nrow = 0 0 0\nrow = 0 1/2 1/2\nrow = 0 0.5 1\n"
        cfg = parse_config(text)
        spec = cfg.operators["T"]
        self.assertIsInstance(spec, Table)
        self.assertEqual(discretize(spec, cfg.grid).key, ((0, 0, 0), (0, 1, 1), (0, 1, 2)))

    def test_table_row_count(self):
        """Test that a table needs one row per grid point."""
        text = "[run]\ngrid = 2\n[operator T]\nfamily = table\nrow = 0 0 0\n"
        with self.assertRaises(ValidationError) as context:
            parse_config(text)
        self.assertIn("needs 3 rows", str(context.exception))

    def test_unknown_key(self):
        """Test that an unknown key is a parse error."""
        with self.assertRaises(ParseError) as context:
            parse_config("[operator A]\nfamily = min, colour = red\n")
        self.assertIn("unknown key 'colour'", str(context.exception))
        self.assertEqual(context.exception.line, 2)

    def test_key_outside_section(self):
        """Test that a key before any section is a parse error."""
        with self.assertRaises(ParseError) as context:
            parse_config("grid = 10\n")
        self.assertIn("before any section", str(context.exception))

    def test_missing_equals(self):
        """Test that a bare word is a parse error."""
        with self.assertRaises(ParseError):
            parse_config("[run]\ngrid\n")

    def test_comments(self):
        """Test that # and ; start comments."""
        cfg = parse_config("# header\n[run] ; run section\ngrid = 5 # five\n")
        self.assertEqual(cfg.grid.n, 5)

    def test_unknown_family_and_wrong_keys(self):
        """Test family validation."""
        with self.assertRaises(ValidationError) as context:
            parse_config("[operator A]\nfamily = mean\n")
        self.assertIn("unknown family 'mean'", str(context.exception))
        with self.assertRaises(ValidationError) as context:
            parse_config("[operator A]\nfamily = min, e = 0.5\n")
        self.assertIn("takes no 'e'", str(context.exception))
        with self.assertRaises(ValidationError) as context:
            parse_config("[operator A]\nfamily = nullnorm, a = 0.5, s = max\n")
        self.assertIn("needs 't'", str(context.exception))

    def test_bad_run_values(self):
        """Test [run] value validation."""
        with self.assertRaises(ValidationError):
            parse_config("[run]\ngrid = 0\n")
        with self.assertRaises(ValidationError):
            parse_config("[run]\ncommand = plot\n")

    def test_params_accessors(self):
        """Test triples, points and flags read from [params]."""
        text = EXAMPLE.replace("u1 = U1, u2 = U2", "u1 = U1, u2 = U2, alpha = 0.7, triple1 = 0.2 0.6 0.8, naive = yes")
        cfg = parse_config(text)
        self.assertEqual(cfg.point("alpha").index, 14)
        self.assertEqual(str(cfg.triple("triple1")), "(0.2, 0.6, 0.8)")
        self.assertEqual(str(cfg.triple("triple2", cfg.operators["U2"])), "(0.3, 0.5, 0.7)")
        self.assertTrue(cfg.flag("naive"))
        with self.assertRaises(ValidationError) as context:
            cfg.point("x")
        self.assertIn("needs 'x'", str(context.exception))

    def test_integer_bounds(self):
        """Test that integer params outside their range name the line."""
        cfg = parse_config("[params]\nchain = 0\n")
        with self.assertRaises(ValidationError) as context:
            cfg.integer("chain", 3, minimum=1, maximum=4)
        self.assertEqual(context.exception.line, 2)
        self.assertIn("1 <= chain <= 4", str(context.exception))
        self.assertEqual(parse_config("[params]\nchain = 4\n").integer("chain", 3, minimum=1, maximum=4), 4)
        self.assertEqual(cfg.integer("absent", 3, minimum=1), 3)


if __name__ == '__main__':
    unittest.main()
