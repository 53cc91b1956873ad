#!/usr/bin/env python3
"""Independent expected values for the subject corpus.

Usage: corpus_oracle.py DDMIN_LOC_BINARY SUBJECTS_DIR SUMMARY_JSON > tests/golden/corpus_expected.csv

SUMMARY_JSON receives the Jaccard / hybrid(0.5) median exam and the share of
failing inputs whose fault is found within the top 3.

Subject programs are executed through `ddmin-loc minilang run` (the subject
under study, as any external program would be). Everything downstream of the
traces is computed here: ddmin2, spectrum counting, the five formulas, the
three modes, ranking with mid-point ties and EXAM. Scores are evaluated in
50-digit decimal arithmetic so that exactly equal scores compare equal.
"""
import csv
import json
import os
import statistics
import subprocess
import sys
import tempfile
from decimal import Decimal, getcontext

getcontext().prec = 50
INF = Decimal("Infinity")
ZERO = Decimal(0)
FORMULAS = ["tarantula", "ochiai", "genprog", "jaccard", "dstar"]
MODES = [("statement", Decimal(0)), ("predicate", Decimal(1)), ("hybrid", Decimal("0.5"))]


def run_program(binary, workdir, program, text, trace_path):
    env = dict(os.environ)
    env.pop("DDMIN_LOC_TRACE", None)
    if trace_path:
        env["DDMIN_LOC_TRACE"] = trace_path
    p = subprocess.run([binary, "minilang", "run", program], input=text.encode(), cwd=workdir,
                       env=env, capture_output=True, timeout=5)
    return p.returncode, p.stdout.decode("utf-8", "surrogateescape")


def strip1(s):
    return s[:-1] if s.endswith("\n") else s


def make_oracle(binary, subject_dir):
    def label(text):
        code, golden = run_program(binary, subject_dir, "golden.ml", text, None)
        if code != 0:
            return "unresolved", None
        with tempfile.TemporaryDirectory() as tmp:
            trace_path = os.path.join(tmp, "t.json")
            code, buggy = run_program(binary, subject_dir, "buggy.ml", text, trace_path)
            if code != 0 or not os.path.exists(trace_path):
                return "unresolved", None
            with open(trace_path) as fh:
                t = json.load(fh)
        trace = ({("line", l) for l in t["lines"]} |
                 {("pred", p["site"], p["outcome"]) for p in t["predicates"]})
        return ("fail" if strip1(golden) != strip1(buggy) else "pass"), trace
    return label


def split(n_atoms, n):
    base, extra = divmod(n_atoms, n)
    out, off = [], 0
    for i in range(n):
        size = base + (1 if i < extra else 0)
        out.append((off, size))
        off += size
    return out


def ddmin(s, test):
    seen = {}

    def t(c):
        if c not in seen:
            seen[c] = test(c)
        return seen[c][0]

    assert t(s) == "fail", s
    n = 2
    while len(s) >= 2:
        parts = split(len(s), n)
        reduced = False
        for off, size in parts:
            c = s[off:off + size]
            if t(c) == "fail":
                s, n, reduced = c, 2, True
                break
        if not reduced:
            for off, size in parts:
                c = s[:off] + s[off + size:]
                if t(c) == "fail":
                    s, n, reduced = c, max(n - 1, 2), True
                    break
        if not reduced:
            if n >= len(s):
                break
            n = min(len(s), 2 * n)
    return seen


def formula(name, f, p, tf, tp):
    f, p, tf, tp = map(Decimal, (f, p, tf, tp))
    if name == "tarantula":
        if f == 0:
            return ZERO
        if tp == 0:
            return Decimal(1)
        return (f / tf) / (f / tf + p / tp)
    if name == "ochiai":
        return ZERO if f == 0 else f / (tf * (f + p)).sqrt()
    if name == "genprog":
        return ZERO if f == 0 else (Decimal(1) if p == 0 else Decimal("0.1"))
    if name == "jaccard":
        return f / (f + p + (tf - f))
    if f == 0:
        return ZERO
    d = p + (tf - f)
    return INF if d == 0 else f * f / d


def scores_for(name, alpha, lines, sites, spectrum, tf, tp):
    out = {}
    for line in lines:
        stmt = formula(name, *spectrum.get(("line", line), (0, 0)), tf, tp)
        pred = ZERO
        for site, site_line in sites:
            if site_line != line:
                continue
            for pol in (False, True):
                pred = max(pred, formula(name, *spectrum.get(("pred", site, pol), (0, 0)), tf, tp))
        if alpha == 0:
            out[line] = stmt
        elif alpha == 1:
            out[line] = pred
        else:
            out[line] = INF if INF in (stmt, pred) else alpha * pred + (1 - alpha) * stmt
    return out


def quantize(x):
    return x if x == INF else x.quantize(Decimal("1e-30"))


def localize(scores, faults):
    snapped = {l: quantize(s) for l, s in scores.items()}
    best = None
    for f in faults:
        s = snapped[f]
        higher = sum(1 for v in snapped.values() if v > s)
        tied = sum(1 for v in snapped.values() if v == s)
        pos = Decimal(higher) + Decimal(tied + 1) / 2
        best = pos if best is None else min(best, pos)
    return best, best / len(scores)


def main():
    binary, root, summary_path = sys.argv[1], sys.argv[2], sys.argv[3]
    headline = []
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["subject", "failing_input_id", "formula", "mode", "exam", "expected_rank",
                "n_pass", "n_fail", "executions"])
    for name in sorted(os.listdir(root)):
        d = os.path.join(root, name)
        fi = os.path.join(d, "failing_inputs.txt")
        if not os.path.exists(fi):
            continue
        with open(os.path.join(d, "map.json")) as fh:
            m = json.load(fh)
        lines = m["executable_lines"]
        sites = [(s["site"], s["line"]) for s in m["predicates"]]
        faults = m["fault_lines"]
        with open(fi) as fh:
            inputs = [l.rstrip("\n") for l in fh if l.rstrip("\n")]
        label = make_oracle(binary, d)
        for idx, text in enumerate(inputs, 1):
            seen = ddmin(text, label)
            spectrum = {}
            tf = tp = 0
            for verdict, trace in seen.values():
                if verdict == "unresolved":
                    continue
                if verdict == "fail":
                    tf += 1
                else:
                    tp += 1
                for e in trace:
                    f, p = spectrum.get(e, (0, 0))
                    spectrum[e] = (f + 1, p) if verdict == "fail" else (f, p + 1)
            for fname in FORMULAS:
                for mname, alpha in MODES:
                    sc = scores_for(fname, alpha, lines, sites, spectrum, tf, tp)
                    rank, exam = localize(sc, faults)
                    if fname == "jaccard" and mname == "hybrid":
                        headline.append((exam, rank <= 3))
                    w.writerow([name, idx, fname, mname, "%.17g" % float(exam),
                                "%.17g" % float(rank), tp, tf, len(seen)])
    exams = sorted(e for e, _ in headline)
    summary = {
        "formula": "jaccard",
        "mode": "hybrid",
        "alpha": 0.5,
        "failing_inputs": len(headline),
        "median_exam": float(statistics.median(exams)),
        "inspect3_fraction": sum(1 for _, hit in headline if hit) / len(headline),
    }
    with open(summary_path, "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")


if __name__ == "__main__":
    main()
