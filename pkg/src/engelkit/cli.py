"""Batch certification runner and small diagnostic commands.

Each claim has a stable id, one certificate file, and a line in the run
summary.  Certificates are JSON with a fixed key order, so re-running a
claim produces byte-identical output up to the timing field.  All file
writes go through a temp-file-and-rename so a crashed run never leaves a
half-written certificate behind.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from . import lie_examples as lex
from . import nilgroup as ng
from . import sandwich_verifier as sv
from . import standard_words as sw

CLAIM_IDS = (
    "lie-example",
    "oddchar-p3",
    "rank3-sandwich-class5",
    "prop21",
    "lemma21",
    "closure-prop22",
    "closure-prop23",
    "lemma31",
    "engel-power",
    "words-N2",
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_REFUTED = 2
EXIT_INCONCLUSIVE = 3


@dataclass
class RunConfig:
    cap: int = 6
    ball: int = 3
    degree: int = 12
    primes: tuple = (2, 3, 5)
    engel: int = 10
    jobs: int = 1
    out: str = "certificates"

    def validate(self):
        if not 2 <= self.cap <= ng.MAX_CLASS:
            raise ValueError("cap must be between 2 and %d" % ng.MAX_CLASS)
        if not 1 <= self.ball <= 3:
            raise ValueError("ball must be between 1 and 3")
        if self.degree < 4:
            raise ValueError("degree must be at least 4")
        if self.engel < 0 or self.engel > 10:
            raise ValueError("engel bound must be between 0 and 10")
        if self.jobs < 1:
            raise ValueError("jobs must be positive")
        for p in self.primes:
            if p < 2:
                raise ValueError("primes must be at least 2")
        return self


def load_config(path: str | None) -> RunConfig:
    """Flat key=value file; unknown keys are rejected."""
    cfg = RunConfig()
    if path is None:
        return cfg
    fields = {"cap", "ball", "degree", "primes", "engel", "jobs", "out"}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError("%s:%d: expected key=value" % (path, lineno))
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if key not in fields:
                raise ValueError("%s:%d: unknown key %r" % (path, lineno, key))
            if key == "out":
                cfg = replace(cfg, out=val)
            elif key == "primes":
                cfg = replace(cfg, primes=tuple(
                    int(x) for x in val.split(",") if x.strip()))
            else:
                cfg = replace(cfg, **{key: int(val)})
    return cfg


def _atomic_write(path: str, data: str) -> None:
    d = os.path.dirname(path) or "."
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


# -- claim builders outside the group-theory module ----------------------------------


def certify_lie_example(cfg: RunConfig) -> sv.Certificate:
    """The rank-3 GF(2) algebra: expected layer dimensions, nonvanishing
    witnesses at every reachable depth, and all defining relations."""
    t0 = time.monotonic()
    A = lex.build_gf2_example(cfg.degree)
    dims = A.dims()
    expected = [3, 2] + [1] * (cfg.degree - 2)
    witness_depths = list(range(1, (cfg.degree - 1) // 2 + 1))
    witnesses_ok = True
    for n in witness_depths:
        try:
            lex.nonnilpotence_witness(A, n)
        except AssertionError:
            witnesses_ok = False
            break
    relations_ok = A.relations_hold()
    ok = dims == expected and witnesses_ok and relations_ok
    return sv.Certificate(
        claim_id="lie-example",
        paper_ref="the rank-3 example algebra over GF(2) satisfies the "
                  "sandwich relations yet keeps a nonzero product at every "
                  "degree",
        params={"rank": 3, "cap": cfg.degree, "ball": 0, "kind": "gf2"},
        status="verified" if ok else "refuted",
        witnesses=[["dims", dims],
                   ["witness_depths", witness_depths],
                   ["relations_hold", relations_ok]],
        duration_ms=int((time.monotonic() - t0) * 1000),
        presentation_hash="")


def certify_oddchar(cfg: RunConfig) -> sv.Certificate:
    """Over GF(p) the pair relations force the triple relation exactly for
    odd p; p = 2 is the exception."""
    t0 = time.monotonic()
    results = [[p, lex.odd_char_check(p)] for p in sorted(set(cfg.primes))]
    ok = all(res == (p != 2) for p, res in results)
    return sv.Certificate(
        claim_id="oddchar-p3",
        paper_ref="over GF(p) with p odd the sandwich pair conditions imply "
                  "the triple condition; over GF(2) they do not",
        params={"rank": 3, "cap": 4, "ball": 0, "kind": "oddchar",
                "primes": sorted(set(cfg.primes))},
        status="verified" if ok else "refuted",
        witnesses=[["per_prime", results]],
        duration_ms=int((time.monotonic() - t0) * 1000),
        presentation_hash="")


def certify_words_n2(cfg: RunConfig) -> sv.Certificate:
    """The forbidden-pattern avoidance bound over one and two letters; every
    longer word contains one of the three pattern shapes."""
    import itertools
    t0 = time.monotonic()
    r1 = sw.longest_avoiding(1)
    r2 = sw.longest_avoiding(2)
    over = [w for w in itertools.product((1, 2), repeat=r2.longest + 1)
            if sw.find_forbidden(w) is None]
    ok = (r1.longest == 1 and r1.exhaustive and r2.exhaustive and not over)
    return sv.Certificate(
        claim_id="words-N2",
        paper_ref="every long enough word over two letters contains a "
                  "subword cc, c x c, or x c x with c standard",
        params={"rank": 2, "cap": 64, "ball": 0, "kind": "avoidance"},
        status="verified" if ok else "refuted",
        witnesses=[["longest_rank1", r1.longest],
                   ["longest_rank2", r2.longest],
                   ["witness", list(r2.witness)],
                   ["exhaustive", r2.exhaustive]],
        duration_ms=int((time.monotonic() - t0) * 1000),
        presentation_hash="")


def certify_engel_all(cfg: RunConfig) -> sv.Certificate:
    t0 = time.monotonic()
    rows = []
    ok = True
    for n in range(cfg.engel + 1):
        c = sv.engel_power_identity(n, bound=cfg.engel)
        ok = ok and c.verified
        rows.append([n, (-2) ** n, c.status])
    return sv.Certificate(
        claim_id="engel-power",
        paper_ref="[x,a,...,a] with n+1 copies of a equals [x,a]^((-2)^n) "
                  "when a has order 2",
        params={"rank": 2, "cap": 0, "ball": 0, "kind": "free-product",
                "max_n": cfg.engel},
        status="verified" if ok else "refuted",
        witnesses=[["per_n", rows]],
        duration_ms=int((time.monotonic() - t0) * 1000),
        presentation_hash="")


def claim_runners(cfg: RunConfig) -> dict:
    return {
        "lie-example": lambda: certify_lie_example(cfg),
        "oddchar-p3": lambda: certify_oddchar(cfg),
        "rank3-sandwich-class5": lambda: sv.certify_rank3_sandwich_class(
            cap=cfg.cap, max_radius=cfg.ball),
        "prop21": lambda: sv.certify_prop21(cap=cfg.cap,
                                            max_radius=cfg.ball),
        "lemma21": lambda: sv.certify_lemma21(cap=cfg.cap,
                                              max_radius=cfg.ball),
        "closure-prop22": lambda: sv.certify_closure(
            kind="partial_strong", rank=4, cap=cfg.cap, radius=2,
            max_radius=cfg.ball),
        "closure-prop23": lambda: sv.certify_closure(
            kind="strong", rank=3, cap=cfg.cap, radius=2,
            max_radius=cfg.ball),
        "lemma31": lambda: sv.certify_lemma31(),
        "engel-power": lambda: certify_engel_all(cfg),
        "words-N2": lambda: certify_words_n2(cfg),
    }


_STATUS_EXIT = {"verified": EXIT_OK, "refuted": EXIT_REFUTED,
                "inconclusive-at-cap": EXIT_INCONCLUSIVE}


def run_certify(claims: list, cfg: RunConfig, echo=print) -> int:
    runners = claim_runners(cfg)
    unknown = [c for c in claims if c not in runners]
    if unknown:
        echo("unknown claim id(s): %s" % ", ".join(unknown))
        echo("known: %s" % ", ".join(CLAIM_IDS))
        return EXIT_USAGE
    results: dict = {}
    if cfg.jobs > 1 and len(claims) > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            futs = {c: pool.submit(runners[c]) for c in claims}
            results = {c: f.result() for c, f in futs.items()}
    else:
        for c in claims:
            results[c] = runners[c]()
    summary_lines = []
    index = []
    for cid in CLAIM_IDS:
        if cid not in results:
            continue
        cert = results[cid]
        path = os.path.join(cfg.out, cid + ".json")
        _atomic_write(path, cert.to_json())
        line = "%-22s %-20s %s" % (cid, cert.status, cert.paper_ref)
        summary_lines.append(line)
        echo(line)
        index.append({"claim_id": cid, "status": cert.status,
                      "paper_ref": cert.paper_ref,
                      "file": cid + ".json",
                      "schema_version": cert.schema_version})
    _atomic_write(os.path.join(cfg.out, "summary.txt"),
                  "\n".join(summary_lines) + "\n")
    _atomic_write(os.path.join(cfg.out, "index.json"),
                  json.dumps({"claims": index, "schema_version":
                              sv.SCHEMA_VERSION}, sort_keys=True, indent=2)
                  + "\n")
    statuses = [results[c].status for c in claims]
    if any(s == "refuted" for s in statuses):
        return EXIT_REFUTED
    if any(s == "inconclusive-at-cap" for s in statuses):
        return EXIT_INCONCLUSIVE
    return EXIT_OK


# -- small diagnostic commands -------------------------------------------------------


def run_lie(args, cfg: RunConfig, echo=print) -> int:
    if args.lie_cmd == "example":
        A = lex.build_gf2_example(cfg.degree)
        echo("degree cap %d  engine %s" % (cfg.degree, A.engine))
        echo("layer dims: %s" % A.dims())
        n = (cfg.degree - 1) // 2
        lex.nonnilpotence_witness(A, n)
        echo("deepest nonvanishing witness: weight %d" % (1 + 2 * n))
        echo("defining relations hold: %s" % A.relations_hold())
        return EXIT_OK
    if args.lie_cmd == "oddchar":
        for p in sorted(set(cfg.primes)):
            echo("p=%d: triple condition forced: %s"
                 % (p, lex.odd_char_check(p)))
        return EXIT_OK
    return EXIT_USAGE


def run_words(args, cfg: RunConfig, echo=print) -> int:
    if args.words_cmd == "avoid":
        res = sw.longest_avoiding(args.rank)
        echo("rank %d: longest avoiding word has length %d" %
             (res.rank, res.longest))
        echo("witness: %s" % sw.format_word(res.witness))
        echo("exhaustive: %s" % res.exhaustive)
        return EXIT_OK
    if args.words_cmd == "standard":
        w = sw.parse_word(args.word)
        if sw.is_standard(w):
            echo("standard")
            echo("bracketing: %s" % sw.bracketing(w))
        else:
            rot = sw.first_violating_rotation(w)
            echo("not standard: rotation %s is not smaller"
                 % sw.format_word(rot))
        return EXIT_OK
    return EXIT_USAGE


def run_group(args, cfg: RunConfig, echo=print) -> int:
    G = ng.free_nilpotent(args.rank, cfg.cap)
    echo("free nilpotent group: rank %d, class cap %d, %d generators"
         % (args.rank, cfg.cap, G.ngens))
    echo("class: %s" % ng.nilpotency_class(G))
    for L in ng.lower_central_series(G):
        echo("  weight %d: %s" % (L.weight, L))
    return EXIT_OK


def run_dump(args, cfg: RunConfig, echo=print) -> int:
    G = ng.free_nilpotent(args.rank, cfg.cap)
    text = ng.dump_presentation(G)
    if args.out_file:
        _atomic_write(args.out_file, text)
        echo("wrote %s (digest %s)" % (args.out_file,
                                       ng.presentation_digest(G)))
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="engelkit",
        description="exact certificates for sandwich group class bounds")
    ap.add_argument("--config", help="flat key=value config file")
    ap.add_argument("--cap", type=int, help="ambient nilpotency class cap")
    ap.add_argument("--ball", type=int, help="maximum conjugator ball radius")
    ap.add_argument("--degree", type=int, help="Lie algebra degree cap")
    ap.add_argument("--prime", type=int, action="append",
                    help="prime for the characteristic checks (repeatable)")
    ap.add_argument("--jobs", type=int, help="concurrent certificates")
    ap.add_argument("--out", help="certificate output directory")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("certify", help="run one claim or all of them")
    p.add_argument("claim", help="claim id or 'all'")

    p = sub.add_parser("lie", help="Lie algebra diagnostics")
    psub = p.add_subparsers(dest="lie_cmd", required=True)
    psub.add_parser("example")
    psub.add_parser("oddchar")

    p = sub.add_parser("words", help="standard word diagnostics")
    psub = p.add_subparsers(dest="words_cmd", required=True)
    pa = psub.add_parser("avoid")
    pa.add_argument("rank", type=int, nargs="?", default=2)
    ps = psub.add_parser("standard")
    ps.add_argument("word")

    p = sub.add_parser("group", help="group presentation diagnostics")
    psub = p.add_subparsers(dest="group_cmd", required=True)
    pg = psub.add_parser("class")
    pg.add_argument("rank", type=int, nargs="?", default=3)

    p = sub.add_parser("dump", help="serialize a presentation")
    psub = p.add_subparsers(dest="dump_cmd", required=True)
    pd = psub.add_parser("presentation")
    pd.add_argument("rank", type=int, nargs="?", default=2)
    pd.add_argument("--out-file")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        # argparse uses exit code 2 for usage errors; 2 is taken
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        cfg = load_config(args.config)
        if args.cap is not None:
            cfg = replace(cfg, cap=args.cap)
        if args.ball is not None:
            cfg = replace(cfg, ball=args.ball)
        if args.degree is not None:
            cfg = replace(cfg, degree=args.degree)
        if args.prime:
            cfg = replace(cfg, primes=tuple(args.prime))
        if args.jobs is not None:
            cfg = replace(cfg, jobs=args.jobs)
        if args.out is not None:
            cfg = replace(cfg, out=args.out)
        cfg.validate()
    except (ValueError, OSError) as e:
        print("config error: %s" % e, file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.cmd == "certify":
            claims = list(CLAIM_IDS) if args.claim == "all" else [args.claim]
            return run_certify(claims, cfg)
        if args.cmd == "lie":
            return run_lie(args, cfg)
        if args.cmd == "words":
            return run_words(args, cfg)
        if args.cmd == "group":
            return run_group(args, cfg)
        if args.cmd == "dump":
            return run_dump(args, cfg)
    except ValueError as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
