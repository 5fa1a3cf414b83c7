"""Drives the treembed binary end to end: exit codes, schemas, determinism."""
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

BIN, SCHEMAS = str(pathlib.Path(sys.argv[1]).resolve()), pathlib.Path(sys.argv[2])
failures = []


def run(*args, code=0, schema=None, cwd=None):
    p = subprocess.run([BIN, *args], capture_output=True, text=True, cwd=cwd)
    if p.returncode != code:
        failures.append(f"{args}: exit {p.returncode}, wanted {code}\n{p.stderr[-500:]}")
        return None
    if schema:
        doc = json.loads(p.stdout)
        jsonschema.validate(doc, json.loads((SCHEMAS / f"{schema}.schema.json").read_text()))
        return doc
    return p.stdout


def check(cond, what):
    if not cond:
        failures.append(what)


with tempfile.TemporaryDirectory() as tmp:
    d = pathlib.Path(tmp)
    g = run("gen", "example1", "--eps", "1/3", "--k", "36", "--verify", "--dir", str(d / "e1"), schema="instances")
    check(g and g["instances"][0]["confirmed"] and g["instances"][0]["oracle"] == "NotFound", "example1 confirmation")
    bundle = d / "e1" / "example1_0"
    run("oracle", "--graph", str(bundle / "host.edges"), "--tree", str(bundle / "pattern.tree"), code=1,
        schema="oracle-result")

    run("gen", "example1", "--eps", "1/4", "--k", "16", "--dir", str(d / "e2"), schema="instances")
    small = d / "e2" / "example1_0"
    o = run("oracle", "--graph", str(small / "host.edges"), "--tree", str(small / "pattern.tree"),
            schema="oracle-result")
    check(o and o["status"] == "Found" and len(o["witness"]) == 17, "boundary instance embeds")
    run("oracle", "--graph", str(small / "host.edges"), "--tree", str(small / "pattern.tree"), "--budget", "1",
        code=3, schema="oracle-result")

    spider = d / "spider_t8.tree"
    spider.write_text("9; 0 0 1 2 3 4 4 4 4\n")
    c = run("color", "--tree", str(spider), schema="coloring")
    check(c and all(c["cut_coloring_bounds"].values()) and all(c["balanced_bounds"].values()), "colour bounds")
    run("decompose", "--tree", str(spider), "--beta", "1/3", schema="decomposition")
    s = run("separator", "--tree", str(spider), schema="separator")
    check(s and max(s["component_sizes"]) <= 4, "separator sizes")

    k44 = d / "k44.edges"
    k44.write_text("".join(f"{a} {b}\n" for a in range(4) for b in range(4, 8)))
    r = run("regcheck", "--graph", str(k44), "--A", "0,1,2,3", "--B", "4,5,6,7", "--eps", "1/4", schema="regcheck")
    check(r and r["verdict"] == "Regular" and r["density"] == "1", "complete pair is regular")
    c5 = d / "c5.edges"
    c5.write_text("0 1\n1 2\n2 3\n3 4\n4 0\n")
    m = run("matchdec", "--graph", str(c5), schema="matching-decomposition")
    check(m and len(m["M"]) == 2 and len(m["I"]) == 1, "C5 decomposition")

    run("gen", "random", "--n", "300", "--min-deg", "33", "--max-deg", "132", "--seed", "3", "--dir", str(d / "r"),
        schema="instances")
    host = d / "r" / "random_0" / "host.edges"
    red = run("reduce", "--graph", str(host), "--cluster-size", "24", "--alpha", "1/10", schema="reduced-graph")
    check(red and len(red["partition"]["clusters"]) >= 10, "reduce builds clusters")
    part = d / "part.json"
    part.write_text(json.dumps(red["partition"]))
    run("matchdec", "--graph", str(host), "--partition", str(part), "--t", "10", schema="refined-matching")

    path = d / "path61.tree"
    path.write_text("61; 0 " + " ".join(str(i) for i in range(60)) + "\n")
    refused = run("embed", "--graph", str(host), "--tree", str(path), code=2, schema="embed-result")
    check(refused and "refused" in refused, "refusal artifact")
    args = ["embed", "--graph", str(host), "--tree", str(path), "--force"]
    e1 = run(*args, schema="embed-result")
    e2 = run(*args)
    check(e1 and e1["ok"] and e1["verified"], "forced embed succeeds")
    check(e1 is not None and json.dumps(e1, indent=2) + "\n" == e2, "embed output is byte-identical")

    sw = ["sweep", "--conj", "two-k-half", "--kmax", "4", "--random-count", "30", "--format", "json"]
    a = run(*sw, schema="sweep-report")
    b = run(*sw, "--jobs", "3")
    check(a and sum(a["totals"].values()) == a["grid_size"], "sweep totals")
    check(a is not None and json.dumps(a, indent=2) + "\n" == b, "sweep independent of --jobs")
    csv = run("sweep", "--conj", "erdos-sos", "--kmax", "3", "--nmax", "5")
    check(csv is not None and csv.startswith("index,k,host,outcome"), "csv header")
    w = run("sweep", "--conj", "two-k-half", "--kmin", "36", "--kmax", "36", "--weaken", "1/3", "--hosts",
            "example1", "--format", "json", "--cex-dir", "cex", code=1, cwd=tmp)
    check((d / "cex" / "cex_0" / "host.edges").exists(), "counterexample dump")

    run("sweep", "--conj", "nope", code=2)
    run("embed", "--graph", str(host), code=2)
    run("oracle", "--graph", str(d / "missing.edges"), "--tree", str(path), code=2)

for f in failures:
    print("FAIL:", f)
print("cli checks:", "ok" if not failures else f"{len(failures)} failed")
sys.exit(1 if failures else 0)
