import contextlib
import csv
import io
import json
import os
import shutil
import tempfile
import unittest
from unittest import mock

from mermin_args.cli import run

CORPUS = os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "corpus"))


def corpus(name):
    return os.path.join(CORPUS, name)


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = run(list(argv))
    return code, out.getvalue(), err.getvalue()


class TestCli(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def test_check_mermin(self):
        code, out, _ = invoke("check", corpus("mermin.json"))
        self.assertEqual(code, 0)
        self.assertEqual(out, "Contextual (no solution in ℤ/2); AvN over ℤ: yes\n")

    def test_check_local(self):
        code, out, _ = invoke("check", corpus("z3_four_parties.json"))
        self.assertEqual(code, 0)
        self.assertEqual(out, "Local (y = 2 in ℤ/3); AvN over ℤ: no\n")

    def test_check_json(self):
        code, out, _ = invoke("check", corpus("mermin.json"), "--format", "json")
        self.assertEqual(code, 0)
        data = json.loads(out)
        self.assertFalse(data["local"])
        self.assertTrue(data["avn"])
        self.assertEqual(data["beta"], [["0", "1/4"]])

    def test_check_prints_text_unless_json_requested(self):
        for name in ("mermin.json", "cyclic_d3_t2.json", "z3_four_parties.json"):
            code, out, _ = invoke("check", corpus(name))
            self.assertEqual(code, 0)
            self.assertRegex(out, r"^(Contextual|Local) \(.*\); AvN over ℤ: (yes|no)\n$")
            with self.assertRaises(ValueError):
                json.loads(out)
        code, out, err = invoke("check", corpus("mermin.json"), "--format", "csv")
        self.assertEqual((code, out), (1, ""))
        self.assertIn("csv", err)

    def test_model_csv(self):
        path = os.path.join(self.tmp, "model.csv")
        code, out, _ = invoke("model", corpus("mermin.json"), "-o", path, "--format", "csv")
        self.assertEqual((code, out), (0, ""))
        with open(path) as f:
            rows = list(csv.reader(f))
        self.assertEqual(rows[0], ["context", "label", "choices", "outcome", "probability"])
        self.assertEqual(len(rows), 1 + 4 * 4)
        self.assertEqual({row[-1] for row in rows[1:]}, {"1/4"})
        self.assertEqual(sorted({row[2] for row in rows[1:]}), ["0 0 0", "0 1 1", "1 0 1", "1 1 0"])

    def test_model_output_is_stable(self):
        first = invoke("model", corpus("cyclic_d4_t2.json"))[1]
        second = invoke("model", corpus("cyclic_d4_t2.json"))[1]
        self.assertEqual(first, second)

    def test_quantum(self):
        code, out, _ = invoke("quantum", corpus("mermin.json"))
        self.assertEqual(code, 0)
        self.assertLessEqual(json.loads(out)["max_deviation"], 1e-9)

    def test_quantum_bad_gcd(self):
        code, out, err = invoke("quantum", corpus("bad_gcd.json"))
        self.assertEqual(code, 2)
        self.assertEqual(out, "")
        self.assertIn("GcdViolation", err)

    def test_lhv(self):
        code, out, _ = invoke("lhv", corpus("z3_four_parties.json"))
        self.assertEqual(code, 0)
        data = json.loads(out)
        self.assertTrue(data["local"])
        self.assertEqual(data["model"]["solution"], [[0], [2]])
        code, out, _ = invoke("lhv", corpus("mermin.json"))
        self.assertEqual(code, 0)
        self.assertFalse(json.loads(out)["local"])

    def test_avn(self):
        code, out, _ = invoke("avn", corpus("mermin.json"), "--oracle")
        self.assertEqual(code, 0)
        data = json.loads(out)
        self.assertTrue(data["avn"])
        self.assertEqual(len(data["theory"]["equations"]), 4)

    def test_cap(self):
        code, _, err = invoke("avn", corpus("mermin.json"), "--oracle", "--cap", "10")
        self.assertEqual(code, 3)
        self.assertIn("SearchSpaceTooLarge", err)
        code, _, _ = invoke("quantum", corpus("mermin.json"), "--cap", "4")
        self.assertEqual(code, 3)

    def test_stdin(self):
        with open(corpus("mermin.json")) as f:
            with mock.patch("sys.stdin", io.StringIO(f.read())):
                code, out, _ = invoke("check", "-")
        self.assertEqual(code, 0)
        self.assertTrue(out.startswith("Contextual"))

    def test_usage_errors(self):
        self.assertEqual(invoke()[0], 1)
        self.assertEqual(invoke("simulate", corpus("mermin.json"))[0], 1)
        self.assertEqual(invoke("model", corpus("mermin.json"), "--format", "xml")[0], 1)
        self.assertEqual(invoke("model", os.path.join(self.tmp, "missing.json"))[0], 1)
        broken = os.path.join(self.tmp, "broken.json")
        with open(broken, "w") as f:
            f.write("{not json")
        self.assertEqual(invoke("check", broken)[0], 1)

    def test_protocol(self):
        config = os.path.join(self.tmp, "config.json")
        with open(config, "w") as f:
            json.dump(
                {
                    "argument": corpus("mermin.json"),
                    "players": 2,
                    "test_probability": 0.3,
                    "rounds": 400,
                    "max_noise": 1.0,
                    "backend": {"kind": "ideal"},
                },
                f,
            )
        code, out, err = invoke("protocol", config, "--seed", "5")
        self.assertEqual(code, 0)
        report = json.loads(out)
        self.assertEqual(report["rounds"]["valid"], 400)
        self.assertEqual(report["decode_success_fraction"], 1.0)
        self.assertIn("noise parameter", err)
        self.assertEqual(out, invoke("protocol", config, "--seed", "5")[1])

    def test_protocol_secret(self):
        secret = os.path.join(self.tmp, "secret.json")
        with open(secret, "w") as f:
            json.dump([[1], [0], [1], [1]], f)
        config = os.path.join(self.tmp, "config.json")
        with open(config, "w") as f:
            json.dump(
                {
                    "argument": corpus("mermin.json"),
                    "players": 2,
                    "test_probability": 0.3,
                    "rounds": 400,
                    "max_noise": 1.0,
                },
                f,
            )
        code, out, _ = invoke("protocol", config, "--secret", secret)
        self.assertEqual(code, 0)
        self.assertEqual(json.loads(out)["secret"], [[1], [0], [1], [1]])

    def test_protocol_invalid_players(self):
        config = os.path.join(self.tmp, "config.json")
        with open(config, "w") as f:
            json.dump(
                {
                    "argument": corpus("mermin.json"),
                    "players": 3,
                    "test_probability": 0.3,
                    "rounds": 10,
                    "max_noise": 0.1,
                },
                f,
            )
        self.assertEqual(invoke("protocol", config)[0], 2)


if __name__ == "__main__":
    unittest.main()
