#!/usr/bin/env python3
"""Writes the benchmark corpora under benchmarks/ (curated/, extra/, medium/)."""

import math
import pathlib
import random

ROOT = pathlib.Path(__file__).resolve().parent.parent / "benchmarks"


def toffoli(a, b, c):
    return [
        f"h q[{c}];", f"cx q[{b}],q[{c}];", f"tdg q[{c}];", f"cx q[{a}],q[{c}];", f"t q[{c}];",
        f"cx q[{b}],q[{c}];", f"tdg q[{c}];", f"cx q[{a}],q[{c}];", f"t q[{b}];", f"t q[{c}];",
        f"h q[{c}];", f"cx q[{a}],q[{b}];", f"t q[{a}];", f"tdg q[{b}];", f"cx q[{a}],q[{b}];",
    ]


def full_adder():
    return 4, (pathlib.Path(__file__).resolve().parent.parent / "benchmarks" / "full_adder.qasm").read_text()


def ghz_fanout(n):
    return n, ["h q[0];"] + [f"cx q[0],q[{k}];" for k in range(1, n)]


def bernstein_vazirani(n, secret):
    body = [f"h q[{k}];" for k in range(n - 1)] + [f"x q[{n - 1}];", f"h q[{n - 1}];"]
    body += [f"cx q[{k}],q[{n - 1}];" for k in range(n - 1) if secret >> k & 1]
    body += [f"h q[{k}];" for k in range(n - 1)]
    return n, body


def qft_phases(n):
    body = []
    for i in range(n):
        body.append(f"h q[{i}];")
        for j in range(i + 1, n):
            angle = math.pi / 2 ** (j - i + 1)
            body += [f"rz({angle:.12g}) q[{j}];", f"cx q[{i}],q[{j}];", f"rz({-angle:.12g}) q[{j}];",
                     f"cx q[{i}],q[{j}];", f"rz({angle:.12g}) q[{i}];"]
    return n, body


def ripple_adder(bits):
    # cin, then (b_k, a_k) pairs, then carry out
    n = 2 * bits + 2
    a = [2 + 2 * k for k in range(bits)]
    b = [1 + 2 * k for k in range(bits)]
    cin, cout = 0, n - 1

    def maj(x, y, z):
        return [f"cx q[{z}],q[{y}];", f"cx q[{z}],q[{x}];"] + toffoli(x, y, z)

    def uma(x, y, z):
        return toffoli(x, y, z) + [f"cx q[{z}],q[{x}];", f"cx q[{x}],q[{y}];"]

    body = maj(cin, b[0], a[0])
    for k in range(1, bits):
        body += maj(a[k - 1], b[k], a[k])
    body.append(f"cx q[{a[-1]}],q[{cout}];")
    for k in range(bits - 1, 0, -1):
        body += uma(a[k - 1], b[k], a[k])
    body += uma(cin, b[0], a[0])
    return n, body


def toffoli_ring(n):
    body = []
    for k in range(n):
        body += toffoli(k, (k + 2) % n, (k + 4) % n)
    return n, body


def random_circuit(n, cnots, seed):
    rng = random.Random(seed)
    body = []
    for _ in range(cnots):
        if rng.random() < 0.3:
            body.append(f"{rng.choice(['h', 't', 'tdg', 's'])} q[{rng.randrange(n)}];")
        c, t = rng.sample(range(n), 2)
        body.append(f"cx q[{c}],q[{t}];")
    return n, body


def write(sub, name, spec):
    n, body = spec
    text = body if isinstance(body, str) else (
        "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n" + f"qreg q[{n}];\n" + "\n".join(body) + "\n")
    (ROOT / sub).mkdir(parents=True, exist_ok=True)
    (ROOT / sub / f"{name}.qasm").write_text(text)


def main():
    write("curated", "full_adder", full_adder())
    write("curated", "ghz_fanout_8", ghz_fanout(8))
    write("curated", "bernstein_vazirani_8", bernstein_vazirani(8, 0b1011011))
    write("curated", "ripple_adder_3", ripple_adder(3))
    write("curated", "toffoli_ring_7", toffoli_ring(7))
    write("curated", "random_8_120", random_circuit(8, 120, 7))
    # naive swap chains beat a static layout on the all-to-all phase pattern
    write("extra", "qft_phases_6", qft_phases(6))
    write("medium", "random_6_520", random_circuit(6, 520, 11))


if __name__ == "__main__":
    main()
