"""Regenerates tests/data/debian_versions.tsv from dpkg --compare-versions."""
import random
import subprocess
import sys

rng = random.Random(20240611)

HANDPICKED = [
    ("1:4.33-2.1build1", "1:4.25-1"),
    ("1.0~rc1", "1.0"),
    ("1.0~~", "1.0~"),
    ("1.0~", "1.0"),
    ("1.0", "1.0-0"),
    ("0:1.0", "1.0"),
    ("1:0.1", "2.0"),
    ("2.30-1ubuntu1", "2.30-1"),
    ("2.30-1+deb10u1", "2.30-1"),
    ("1.2.3a", "1.2.3"),
    ("1.2.3.", "1.2.3"),
    ("1.2.3+build1", "1.2.3-build1"),
    ("7.6p2-4", "7.6-0"),
    ("1.0.0", "1.00"),
    ("10", "9"),
    ("1a", "1A"),
    ("1.0-1~bpo10+1", "1.0-1"),
    ("3.0~beta.1", "3.0~alpha.2"),
    ("2:1.0", "1:9.9"),
    ("1.0+dfsg-1", "1.0-1"),
]


def piece():
    kind = rng.random()
    if kind < 0.5:
        return str(rng.randint(0, 12))
    if kind < 0.7:
        return rng.choice(["a", "b", "rc", "beta", "dfsg", "build", "ubuntu", "p"]) + str(rng.randint(0, 3))
    return rng.choice(["~", "~rc", "+", ".", "+b", "~bpo"]) + str(rng.randint(0, 3))


def version():
    v = str(rng.randint(0, 4))
    for _ in range(rng.randint(0, 3)):
        p = piece()
        v += p if p[0] in "~+." else "." + p
    if rng.random() < 0.5:
        v += "-" + str(rng.randint(0, 3)) + rng.choice(["", "build1", "ubuntu2", "+deb11u1", "~exp1"])
    if rng.random() < 0.25:
        v = str(rng.randint(0, 2)) + ":" + v
    return v


def dpkg(a, b):
    for op, sign in (("lt", "<"), ("eq", "="), ("gt", ">")):
        if subprocess.run(["dpkg", "--compare-versions", a, op, b]).returncode == 0:
            return sign
    sys.exit("dpkg gave no verdict for %s %s" % (a, b))


pairs = list(HANDPICKED)
while len(pairs) < 200:
    a, b = version(), version()
    if rng.random() < 0.1:
        b = a
    pairs.append((a, b))

for a, b in pairs:
    print("%s\t%s\t%s" % (a, dpkg(a, b), b))
