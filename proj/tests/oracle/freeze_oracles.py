#!/usr/bin/env python3
"""Freeze oracle expectations for the sqleval/corpus test suites.

Runs the official Spider evaluation scripts (tests/oracle/official) and the
reference execution oracle (ex_oracle.py) over the fixture corpus and writes
JSON files to tests/fixtures/oracle/. The C++ tests only read those files.

Usage: freeze_oracles.py <fixtures_dir>
   e.g. python3 tests/oracle/freeze_oracles.py tests/fixtures
"""

import copy
import json
import os
import random
import subprocess
import sys
import tempfile

HERE = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, os.path.join(HERE, "official"))

import nltk.tokenize  # noqa: E402

import process_sql  # noqa: E402

process_sql.word_tokenize = lambda s: nltk.tokenize.word_tokenize(s, preserve_line=True)

import evaluation  # noqa: E402
import ex_oracle  # noqa: E402

SEED = 20240917

# (db_id, pred, gold) pairs written by hand to cover EM/EX corner cases.
HAND_EM_PAIRS = [
    ("concert_singer", "SELECT count(*) FROM singer", "SELECT count(*) FROM singer"),
    ("concert_singer", "SELECT name FROM singer WHERE age > 20 AND country = 'France'",
     "SELECT name FROM singer WHERE country = 'USA' AND age > 30"),
    ("concert_singer", "SELECT T1.name FROM singer AS T1", "SELECT name FROM singer"),
    ("concert_singer", "SELECT country , count(*) FROM singer",
     "SELECT country , count(*) FROM singer GROUP BY country"),
    ("concert_singer", "SELECT DISTINCT country FROM singer", "SELECT country FROM singer"),
    ("concert_singer", "SELECT count(DISTINCT country) FROM singer", "SELECT count(country) FROM singer"),
    ("concert_singer", "SELECT name FROM singer ORDER BY age DESC", "SELECT name FROM singer ORDER BY age ASC"),
    ("concert_singer", "SELECT name FROM singer ORDER BY age LIMIT 1", "SELECT name FROM singer ORDER BY age"),
    ("concert_singer", "SELECT name FROM singer ORDER BY age LIMIT 3", "SELECT name FROM singer ORDER BY age LIMIT 1"),
    ("concert_singer",
     "SELECT T1.name FROM singer_in_concert AS T2 JOIN singer AS T1 ON T1.singer_id = T2.singer_id",
     "SELECT T1.name FROM singer AS T1 JOIN singer_in_concert AS T2 ON T1.singer_id = T2.singer_id"),
    ("concert_singer",
     "SELECT T2.singer_id FROM singer AS T1 JOIN singer_in_concert AS T2 ON T1.singer_id = T2.singer_id",
     "SELECT T1.singer_id FROM singer AS T1 JOIN singer_in_concert AS T2 ON T1.singer_id = T2.singer_id"),
    ("concert_singer", "SELECT name FROM stadium WHERE stadium_id IN (SELECT stadium_id FROM concert)",
     "SELECT name FROM stadium WHERE stadium_id NOT IN (SELECT stadium_id FROM concert)"),
    ("concert_singer", "SELECT country FROM singer WHERE age > 40 UNION SELECT country FROM singer WHERE age < 30",
     "SELECT country FROM singer WHERE age > 40 INTERSECT SELECT country FROM singer WHERE age < 30"),
    ("concert_singer", "SELECT count(name) FROM singer", "SELECT count(*) FROM singer"),
    ("concert_singer", "SELECT country FROM singer GROUP BY country HAVING count(*) > 1",
     "SELECT country FROM singer GROUP BY country HAVING count(*) > 5"),
    ("concert_singer", "SELECT country FROM singer GROUP BY country HAVING avg(age) > 1",
     "SELECT country FROM singer GROUP BY country HAVING count(*) > 1"),
    ("concert_singer", "SELECT name FROM singer WHERE song_name = 'Hey'",
     "SELECT name FROM singer WHERE song_name LIKE '%Hey%'"),
    ("concert_singer", "SELECT name FROM singer WHERE age > 20 OR country = 'France'",
     "SELECT name FROM singer WHERE age > 20 AND country = 'France'"),
    ("concert_singer",
     "SELECT T2.name , count(*) FROM concert AS T1 JOIN stadium AS T2 ON T1.stadium_id = T2.stadium_id GROUP BY T2.stadium_id",
     "SELECT T2.name , count(*) FROM concert AS T1 JOIN stadium AS T2 ON T1.stadium_id = T2.stadium_id GROUP BY T1.stadium_id"),
    ("concert_singer", "SELECT name FROM singer s", "SELECT name FROM singer"),
    ("concert_singer", "SELECT name FROM singer LEFT JOIN concert", "SELECT name FROM singer"),
    ("concert_singer", "SELECT name , age FROM singer", "SELECT name FROM singer"),
    ("concert_singer", "SELECT name FROM singer ORDER BY age , name", "SELECT name FROM singer ORDER BY name , age"),
    ("concert_singer", "SELECT name FROM stadium WHERE capacity >= 5000 AND capacity <= 10000",
     "SELECT name FROM stadium WHERE capacity BETWEEN 5000 AND 10000"),
    ("concert_singer", "SELECT song_name FROM singer WHERE age > (SELECT max(age) FROM singer)",
     "SELECT song_name FROM singer WHERE age > (SELECT avg(age) FROM singer)"),
    ("concert_singer", "SELECT song_name FROM singer WHERE age > (SELECT avg(age) FROM singer WHERE country = 'a')",
     "SELECT song_name FROM singer WHERE age > (SELECT avg(age) FROM singer WHERE country = 'b')"),
    ("concert_singer", "select NAME from SINGER", "SELECT name FROM singer"),
    ("concert_singer", "SELECT max(age) - min(age) FROM singer", "SELECT max(age) FROM singer"),
    ("concert_singer", "SELECT T1.name FROM singer AS T1 JOIN concert AS T2",
     "SELECT T1.name FROM singer AS T1 JOIN concert AS T2 ON T1.singer_id = T2.concert_id"),
    ("concert_singer", "SELECT name FROM singer WHERE name NOT LIKE '%a%'",
     "SELECT name FROM singer WHERE name LIKE '%a%'"),
    ("concert_singer", "SELECT avg(age) , min(age) FROM singer", "SELECT min(age) , avg(age) FROM singer"),
    ("concert_singer", "SELECT name FROM singer WHERE age = 'x' AND age = 'y'",
     "SELECT name FROM singer WHERE age = 'x'"),
    ("concert_singer", "SELECT name FROM singer WHERE name = \"Joe\"", "SELECT name FROM singer WHERE name = 'Joe'"),
    ("concert_singer", "SELECT name FROM singer WHERE age != 3", "SELECT name FROM singer WHERE age > 3"),
    ("concert_singer", "SELECT name FROM singer WHERE age>=3", "SELECT name FROM singer WHERE age >= 30"),
    ("concert_singer", "SELECT name FROM singer;", "SELECT name FROM singer"),
    ("concert_singer", "SELECT * FROM singer", "SELECT name FROM singer"),
    ("pets_1", "SELECT count(*) FROM student WHERE stuid NOT IN (SELECT stuid FROM has_pet)",
     "SELECT count(*) FROM student WHERE stuid NOT IN (SELECT T1.stuid FROM has_pet AS T1)"),
    ("pets_1", "SELECT T1.fname FROM student AS T1 JOIN has_pet AS T2 ON T1.stuid = T2.stuid JOIN pets AS T3 ON T3.petid = T2.petid WHERE T3.pettype = 'cat'",
     "SELECT T1.fname FROM student AS T1 JOIN has_pet AS T2 ON T1.stuid = T2.stuid JOIN pets AS T3 ON T3.petid = T2.petid WHERE T3.pettype = 'dog'"),
    ("pets_1", "SELECT max(weight) , pettype FROM pets GROUP BY pettype",
     "SELECT pettype , max(weight) FROM pets GROUP BY pettype"),
    ("pets_1", "SELECT count(*) FROM pets WHERE weight > 10 AND pet_age < 3 OR pettype = 'dog'",
     "SELECT count(*) FROM pets WHERE weight > 10 OR pet_age < 3 AND pettype = 'dog'"),
    ("world_1", "SELECT Name FROM country WHERE Continent = 'Asia' ORDER BY Population DESC LIMIT 1",
     "SELECT Name FROM country WHERE Continent = 'Europe' ORDER BY Population DESC LIMIT 5"),
    ("world_1", "SELECT T2.Language FROM country AS T1 JOIN countrylanguage AS T2 ON T1.Code = T2.CountryCode WHERE T1.Name = 'Aruba'",
     "SELECT T2.Language FROM country AS T1 JOIN countrylanguage AS T2 ON T1.Code = T2.CountryCode WHERE T1.Name = 'Aruba' ORDER BY T2.Percentage DESC"),
    ("world_1", "SELECT count(DISTINCT T2.Language) FROM country AS T1 JOIN countrylanguage AS T2 ON T1.Code = T2.CountryCode",
     "SELECT count(DISTINCT Language) FROM countrylanguage"),
    ("world_1", "SELECT Name FROM city WHERE Population BETWEEN 160000 AND 900000",
     "SELECT name FROM city WHERE population BETWEEN 160000 AND 900000"),
]

HAND_EX_PAIRS = [
    ("concert_singer", "SELECT max(age) FROM singer", "SELECT age FROM singer ORDER BY age DESC LIMIT 1"),
    ("concert_singer", "SELECT age FROM singer ORDER BY age DESC LIMIT 1", "SELECT max(age) FROM singer"),
    ("concert_singer", "SELECT name FROM singer ORDER BY name", "SELECT name FROM singer"),
    ("concert_singer", "SELECT name FROM singer ORDER BY age ASC", "SELECT name FROM singer ORDER BY age DESC"),
    ("concert_singer", "SELECT age , name FROM singer", "SELECT name , age FROM singer"),
    ("concert_singer", "SELECT name FROM singer WHERE", "SELECT name FROM singer"),
    ("concert_singer", "SELECT nickname FROM singer", "SELECT name FROM singer"),
    ("concert_singer", "SELECT count(singer_id) FROM singer", "SELECT count(*) FROM singer"),
    ("concert_singer", "SELECT sum(age) * 1.0 / count(*) FROM singer", "SELECT avg(age) FROM singer"),
    ("concert_singer", "SELECT NULL", "SELECT NULL"),
    ("concert_singer", "SELECT 0", "SELECT NULL"),
    ("concert_singer", "DROP TABLE singer", "SELECT count(*) FROM singer"),
    ("concert_singer", "SELECT DISTINCT country FROM singer", "SELECT country FROM singer"),
    ("concert_singer", "SELECT 1.0", "SELECT 1"),
    ("concert_singer", "SELECT '1'", "SELECT 1"),
    ("concert_singer", "SELECT 1; SELECT 2", "SELECT 1"),
    ("concert_singer", "SELECT name FROM singer WHERE age > 1000", "SELECT name FROM singer WHERE age < -1"),
    ("concert_singer", "SELECT name , age FROM singer WHERE age > 1000", "SELECT name FROM singer WHERE age < -1"),
    ("concert_singer", "SELECT 0.1 + 0.2", "SELECT 0.3"),
    ("concert_singer", "SELECT 1.0000001", "SELECT 1.0"),
    ("concert_singer", "SELECT name FROM singer UNION ALL SELECT name FROM singer", "SELECT name FROM singer"),
    ("pets_1", "SELECT pettype , max(weight) FROM pets GROUP BY pettype",
     "SELECT max(weight) , pettype FROM pets GROUP BY pettype"),
    ("pets_1", "SELECT stuid FROM has_pet", "SELECT T1.stuid FROM student AS T1 JOIN has_pet AS T2 ON T1.stuid = T2.stuid"),
    ("world_1", "SELECT Name FROM country ORDER BY Population DESC LIMIT 3",
     "SELECT Name FROM country ORDER BY Population DESC LIMIT 3"),
    ("world_1", "SELECT count(*) FROM city", "SELECT count(*) FROM city WHERE 1 = 1"),
]


def load_tables(path):
    with open(path) as f:
        return {e["db_id"]: e for e in json.load(f)}


def schema_of(entry):
    schema = {}
    for ti, tname in enumerate(entry["table_names_original"]):
        schema[tname.lower()] = [c[1].lower() for c in entry["column_names_original"] if c[0] == ti]
    return process_sql.Schema(schema)


def try_parse(schema, sql):
    try:
        return process_sql.get_sql(schema, sql), None
    except Exception as exc:  # noqa: BLE001
        return None, repr(exc)


def mask_values(node):
    """Replace literal values with typed placeholders; convert tuples to lists."""
    if isinstance(node, dict):
        out = {k: mask_values(v) for k, v in node.items()}
        if "limit" in node:
            out["limit"] = node["limit"] is not None
        return out
    if isinstance(node, (list, tuple)):
        return [mask_values(x) for x in node]
    return node


def mask_cond_values(sql):
    def cond(c):
        res = []
        for i, item in enumerate(c):
            if i % 2 == 1:
                res.append(item)
                continue
            not_op, op_id, val_unit, v1, v2 = item
            res.append([not_op, op_id, val_unit, value(v1), value(v2)])
        return res

    def value(v):
        if v is None:
            return None
        if isinstance(v, dict):
            return mask_cond_values(v)
        if isinstance(v, float):
            return "<number>"
        if isinstance(v, str):
            return "<string>"
        return v

    out = dict(sql)
    out["from"] = {
        "table_units": [
            [tu[0], mask_cond_values(tu[1]) if isinstance(tu[1], dict) else tu[1]]
            for tu in sql["from"]["table_units"]
        ],
        "conds": cond(sql["from"]["conds"]),
    }
    out["where"] = cond(sql["where"])
    out["having"] = cond(sql["having"])
    for op in ("intersect", "union", "except"):
        out[op] = mask_cond_values(sql[op]) if sql[op] is not None else None
    return out


def official_em(entry, pred, gold):
    schema = schema_of(entry)
    kmap = evaluation.build_foreign_key_map(entry)
    g_sql, g_err = try_parse(schema, gold)
    p_sql, p_err = try_parse(schema, pred)
    if g_sql is None:
        g_sql = copy.deepcopy(evaluation._EMPTY_SQL)
    if p_sql is None:
        p_sql = copy.deepcopy(evaluation._EMPTY_SQL)
    g_valid = evaluation.build_valid_col_units(g_sql["from"]["table_units"], schema)
    g_sql = evaluation.rebuild_sql_col(g_valid, evaluation.rebuild_sql_val(g_sql), kmap)
    p_valid = evaluation.build_valid_col_units(p_sql["from"]["table_units"], schema)
    p_sql = evaluation.rebuild_sql_col(p_valid, evaluation.rebuild_sql_val(p_sql), kmap)
    em = evaluation.Evaluator().eval_exact_match(p_sql, g_sql)
    return {
        "em": bool(em),
        "pred_parse_error": p_err is not None,
        "gold_parse_error": g_err is not None,
    }


def gold_order_matters(entry, gold):
    parsed, err = try_parse(schema_of(entry), gold)
    if parsed is None:
        return "order by" in gold.lower()
    return len(parsed["orderBy"]) > 0


def main():
    fixtures = os.path.abspath(sys.argv[1])
    spider = os.path.join(fixtures, "spider")
    out_dir = os.path.join(fixtures, "oracle")
    os.makedirs(out_dir, exist_ok=True)
    tables = load_tables(os.path.join(spider, "tables.json"))
    with open(os.path.join(spider, "dev.json")) as f:
        dev = json.load(f)

    tmp = tempfile.mkdtemp(prefix="starsql_oracle_")
    subprocess.check_call([sys.executable, os.path.join(fixtures, "make_fixture_dbs.py"),
                           os.path.join(spider, "tables.json"), tmp])

    def db_path(db_id):
        return os.path.join(tmp, db_id, db_id + ".sqlite")

    rng = random.Random(SEED)

    # Tokenizer: every dev query plus every hand-written pair side.
    token_queries = [x["query"] for x in dev]
    token_queries += [p for _, p, _ in HAND_EM_PAIRS] + [g for _, _, g in HAND_EM_PAIRS]
    tokens = []
    for q in dict.fromkeys(token_queries):
        try:
            tokens.append({"query": q, "tokens": process_sql.tokenize(q)})
        except AssertionError:
            tokens.append({"query": q, "error": True})
    dump(out_dir, "tokens.json", tokens)

    # Hardness of every dev gold query.
    evaluator = evaluation.Evaluator()
    hardness = []
    for i, x in enumerate(dev):
        parsed, err = try_parse(schema_of(tables[x["db_id"]]), x["query"])
        hardness.append({
            "index": i, "db_id": x["db_id"], "query": x["query"],
            "hardness": evaluator.eval_hardness(parsed) if parsed is not None else None,
        })
    dump(out_dir, "hardness.json", hardness)

    # Clause decomposition of a seeded sample of dev queries plus hand queries.
    sample = rng.sample(range(len(dev)), 120)
    decomp = []
    seen = set()
    items = [(dev[i]["db_id"], dev[i]["query"]) for i in sorted(sample)]
    items += [(db, q) for db, p, g in HAND_EM_PAIRS for q in (p, g)]
    for db_id, q in items:
        if (db_id, q) in seen:
            continue
        seen.add((db_id, q))
        parsed, err = try_parse(schema_of(tables[db_id]), q)
        rec = {"db_id": db_id, "query": q}
        if parsed is None:
            rec["error"] = True
        else:
            rec["sql"] = mask_values(mask_cond_values(parsed))
        decomp.append(rec)
    dump(out_dir, "decomposition.json", decomp)

    # EM pairs: hand pairs, consecutive paraphrase pairs that differ, and
    # random same-database cross pairs.
    pairs = list(HAND_EM_PAIRS)
    for i in range(0, len(dev) - 1, 2):
        a, b = dev[i], dev[i + 1]
        if a["db_id"] == b["db_id"] and a["query"] != b["query"]:
            pairs.append((a["db_id"], a["query"], b["query"]))
    by_db = {}
    for x in dev:
        by_db.setdefault(x["db_id"], []).append(x["query"])
    for _ in range(60):
        db_id = rng.choice(sorted(by_db))
        p, g = rng.sample(by_db[db_id], 2)
        pairs.append((db_id, p, g))
    em_pairs = []
    for db_id, p, g in pairs:
        rec = {"db_id": db_id, "pred": p, "gold": g}
        rec.update(official_em(tables[db_id], p, g))
        em_pairs.append(rec)
    dump(out_dir, "em_pairs.json", em_pairs)

    # EX pairs: hand pairs and the same paraphrase/cross pairs.
    ex_pairs = []
    for db_id, p, g in HAND_EX_PAIRS + pairs:
        gold = ex_oracle.execute(db_path(db_id), g)
        if not gold["ok"]:
            continue
        pred = ex_oracle.execute(db_path(db_id), p)
        order = gold_order_matters(tables[db_id], g)
        ex_pairs.append({
            "db_id": db_id, "pred": p, "gold": g, "gold_has_order_by": order,
            "ex": ex_oracle.ex_match(pred, gold, order),
        })
    dump(out_dir, "ex_pairs.json", ex_pairs)

    print(f"tokens={len(tokens)} hardness={len(hardness)} decomposition={len(decomp)} "
          f"em_pairs={len(em_pairs)} ex_pairs={len(ex_pairs)}")


def dump(out_dir, name, obj):
    with open(os.path.join(out_dir, name), "w") as f:
        json.dump(obj, f, indent=1, ensure_ascii=False)
        f.write("\n")


if __name__ == "__main__":
    main()
