//! Randomised correct solutions and mutants for five small exercises.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use tokfix::encoding::{token_sequence, TokenSequence};
use tokfix::frontend::{parse_source, Category, Language, Token, TokenKind};
use tokfix::judge::{Judge, Limits, TestCase};
use tokfix::repair::render;

pub struct Exercise {
    pub id: &'static str,
    pub generate: fn(&mut StdRng) -> String,
    pub tests: fn(&mut StdRng) -> Vec<(String, String)>,
}

pub fn exercises() -> Vec<Exercise> {
    vec![
        Exercise { id: "1678", generate: gen_count, tests: tests_count },
        Exercise { id: "1689", generate: gen_reverse, tests: tests_reverse },
        Exercise { id: "1703", generate: gen_seven, tests: tests_seven },
        Exercise { id: "1716", generate: gen_average, tests: tests_average },
        Exercise { id: "1720", generate: gen_days, tests: tests_days },
    ]
}

const NAMES: &[&str] = &[
    "n", "k", "m", "num", "cnt", "len", "total", "x", "v", "val", "t", "tmp", "a", "b", "c", "q", "w", "s",
    "sum", "res", "ans", "acc", "z", "y", "e", "r", "p", "u", "h", "g",
];

struct Names {
    used: HashSet<&'static str>,
}

impl Names {
    fn new() -> Self {
        Names { used: HashSet::new() }
    }

    fn pick(&mut self, rng: &mut StdRng, prefs: &[&'static str]) -> &'static str {
        let mut pool: Vec<&'static str> = prefs.iter().copied().filter(|p| !self.used.contains(p)).collect();
        if pool.is_empty() || rng.gen_bool(0.15) {
            pool = NAMES.iter().copied().filter(|p| !self.used.contains(p)).collect();
        }
        let name = *pool.choose(rng).unwrap();
        self.used.insert(name);
        name
    }
}

fn header(rng: &mut StdRng) -> String {
    let mut s = String::from("#include <stdio.h>\n");
    if rng.gen_bool(0.3) {
        s.push_str("#include <stdlib.h>\n");
    }
    s.push_str(if rng.gen_bool(0.5) { "int main() {\n" } else { "int main(void) {\n" });
    s
}

fn footer(rng: &mut StdRng) -> &'static str {
    if rng.gen_bool(0.85) {
        "    return 0;\n}\n"
    } else {
        "}\n"
    }
}

/// A counted loop over `0..bound` (or `1..=bound` when `one_based`).
/// Returns (declaration needed before the loop, loop head, closing text).
fn counted_loop(rng: &mut StdRng, var: &str, bound: &str, any_base: bool) -> (String, String, &'static str) {
    let style = rng.gen_range(0..if any_base { 5 } else { 4 });
    match style {
        0 => (String::new(), format!("for (int {var} = 0; {var} < {bound}; {var}++)"), ""),
        1 => (format!("    int {var};\n"), format!("for ({var} = 0; {var} < {bound}; ++{var})"), ""),
        2 => (format!("    int {var};\n"), format!("for ({var} = 0; {var} < {bound}; {var} = {var} + 1)"), ""),
        3 => (format!("    int {var} = 0;\n"), format!("while ({var} < {bound})"), "inc"),
        _ => (String::new(), format!("for (int {var} = 1; {var} <= {bound}; {var}++)"), ""),
    }
}

fn incr(rng: &mut StdRng, v: &str) -> String {
    match rng.gen_range(0..4) {
        0 => format!("{v}++;"),
        1 => format!("++{v};"),
        2 => format!("{v} += 1;"),
        _ => format!("{v} = {v} + 1;"),
    }
}

/// Loop with `body` lines; while-loops get their increment appended.
fn emit_loop(rng: &mut StdRng, out: &mut String, var: &str, bound: &str, any_base: bool, body: &[String]) {
    let (decl, head, kind) = counted_loop(rng, var, bound, any_base);
    out.push_str(&decl);
    let mut lines: Vec<String> = body.to_vec();
    if kind == "inc" {
        lines.push(incr(rng, var));
    }
    if lines.len() == 1 && rng.gen_bool(0.4) {
        out.push_str(&format!("    {head}\n        {}\n", lines[0]));
    } else {
        out.push_str(&format!("    {head} {{\n"));
        for l in &lines {
            out.push_str(&format!("        {l}\n"));
        }
        out.push_str("    }\n");
    }
}

fn ints(rng: &mut StdRng, n: usize, lo: i32, hi: i32) -> Vec<i32> {
    (0..n).map(|_| rng.gen_range(lo..=hi)).collect()
}

fn join(v: &[i32]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

// ---- 1678: count occurrences of 1, 5 and 10 ------------------------------

fn gen_count(rng: &mut StdRng) -> String {
    let mut nm = Names::new();
    let k = nm.pick(rng, &["k", "n", "num", "len"]);
    let x = nm.pick(rng, &["x", "v", "val", "t"]);
    let i = nm.pick(rng, &["i", "j", "p"]);
    let mut s = header(rng);
    let use_array = rng.gen_bool(0.3);
    let (c1, c5, c10);
    if use_array {
        let arr = nm.pick(rng, &["cnt", "c", "times", "freq"]);
        s.push_str(&format!("    int {k}, {x};\n    int {arr}[11] = {{0}};\n"));
        c1 = format!("{arr}[1]");
        c5 = format!("{arr}[5]");
        c10 = format!("{arr}[10]");
    } else {
        let a = nm.pick(rng, &["a", "one", "c1", "n1"]);
        let b = nm.pick(rng, &["b", "five", "c5", "n5"]);
        let c = nm.pick(rng, &["c", "ten", "c10", "n10"]);
        if rng.gen_bool(0.5) {
            s.push_str(&format!("    int {k}, {x}, {a} = 0, {b} = 0, {c} = 0;\n"));
        } else {
            s.push_str(&format!("    int {k};\n    int {x};\n    int {a} = 0;\n    int {b} = 0;\n    int {c} = 0;\n"));
        }
        c1 = a.to_string();
        c5 = b.to_string();
        c10 = c.to_string();
    }
    s.push_str(&format!("    scanf(\"%d\", &{k});\n"));
    let mut body = vec![format!("scanf(\"%d\", &{x});")];
    if use_array {
        body.push(if rng.gen_bool(0.5) {
            format!("{c1_arr}++;", c1_arr = c1.replace("[1]", &format!("[{x}]")))
        } else {
            incr(rng, &c1.replace("[1]", &format!("[{x}]")))
        });
    } else {
        let mut checks = [("1", c1.clone()), ("5", c5.clone()), ("10", c10.clone())];
        checks.shuffle(rng);
        let chain = rng.gen_bool(0.5);
        for (n, (lit, var)) in checks.iter().enumerate() {
            let cond = if rng.gen_bool(0.8) { format!("{x} == {lit}") } else { format!("{lit} == {x}") };
            let kw = if chain && n > 0 { "else if" } else { "if" };
            body.push(format!("{kw} ({cond}) {}", incr(rng, var)));
        }
    }
    emit_loop(rng, &mut s, i, k, true, &body);
    if rng.gen_bool(0.5) {
        s.push_str(&format!("    printf(\"%d\\n%d\\n%d\\n\", {c1}, {c5}, {c10});\n"));
    } else {
        for v in [&c1, &c5, &c10] {
            s.push_str(&format!("    printf(\"%d\\n\", {v});\n"));
        }
    }
    s.push_str(footer(rng));
    s
}

fn tests_count(rng: &mut StdRng) -> Vec<(String, String)> {
    let mut cases = vec![vec![1, 5, 8, 10, 5]];
    for _ in 0..5 {
        let n = rng.gen_range(2..40);
        cases.push(ints(rng, n, 1, 10));
    }
    cases.push(vec![2, 3]);
    cases
        .into_iter()
        .map(|v| {
            let c = |t| v.iter().filter(|&&x| x == t).count();
            (format!("{}\n{}\n", v.len(), join(&v)), format!("{}\n{}\n{}\n", c(1), c(5), c(10)))
        })
        .collect()
}

// ---- 1689: reverse an array ------------------------------------------------

fn gen_reverse(rng: &mut StdRng) -> String {
    let mut nm = Names::new();
    let n = nm.pick(rng, &["n", "len", "k", "num"]);
    let a = nm.pick(rng, &["a", "arr", "b", "s", "data"]);
    let i = nm.pick(rng, &["i", "j", "p"]);
    let size = ["100", "105", "110", "200", "1000"].choose(rng).unwrap();
    let mut s = header(rng);
    s.push_str(&format!("    int {n};\n    int {a}[{size}];\n"));
    s.push_str(&format!("    scanf(\"%d\", &{n});\n"));
    let read = if rng.gen_bool(0.8) {
        format!("scanf(\"%d\", &{a}[{i}]);")
    } else {
        format!("scanf(\"%d\", {a} + {i});")
    };
    emit_loop(rng, &mut s, i, n, false, &[read]);
    let j = nm.pick(rng, &["j", "q", "r", "w"]);
    match rng.gen_range(0..4) {
        0 => {
            let tail = if rng.gen_bool(0.5) { "    printf(\"\\n\");\n" } else { "" };
            s.push_str(&format!(
                "    for (int {j} = {n} - 1; {j} >= 0; {j}--)\n        printf(\"%d \", {a}[{j}]);\n{tail}"
            ));
        }
        1 => {
            s.push_str(&format!(
                "    for (int {j} = {n} - 1; {j} > 0; {j}--) {{\n        printf(\"%d \", {a}[{j}]);\n    }}\n    printf(\"%d\\n\", {a}[0]);\n"
            ));
        }
        2 => {
            s.push_str(&format!(
                "    for (int {j} = 0; {j} < {n}; {j}++)\n        printf(\"%d \", {a}[{n} - 1 - {j}]);\n"
            ));
        }
        _ => {
            let t = nm.pick(rng, &["t", "tmp", "swap"]);
            s.push_str(&format!(
                "    for (int {j} = 0; {j} < {n} / 2; {j}++) {{\n        int {t} = {a}[{j}];\n        {a}[{j}] = {a}[{n} - 1 - {j}];\n        {a}[{n} - 1 - {j}] = {t};\n    }}\n    for (int {j} = 0; {j} < {n}; {j}++)\n        printf(\"%d \", {a}[{j}]);\n"
            ));
        }
    }
    s.push_str(footer(rng));
    s
}

fn tests_reverse(rng: &mut StdRng) -> Vec<(String, String)> {
    let mut cases = vec![vec![8, 6, 5, 4, 1], vec![3, 9]];
    for _ in 0..5 {
        let n = rng.gen_range(2..99);
        cases.push(ints(rng, n, -50, 500));
    }
    cases
        .into_iter()
        .map(|v| {
            let mut r = v.clone();
            r.reverse();
            (format!("{}\n{}\n", v.len(), join(&v)), format!("{}\n", join(&r)))
        })
        .collect()
}

// ---- 1703: squares of numbers unrelated to seven ---------------------------

fn gen_seven(rng: &mut StdRng) -> String {
    let mut nm = Names::new();
    let n = nm.pick(rng, &["n", "m", "k", "limit"]);
    let sum = nm.pick(rng, &["sum", "s", "total", "ans", "res"]);
    let i = nm.pick(rng, &["i", "j", "x"]);
    let mut parts = [
        (format!("{i} % 7 == 0"), format!("{i} % 7 != 0")),
        (format!("{i} % 10 == 7"), format!("{i} % 10 != 7")),
        (format!("{i} / 10 == 7"), format!("{i} / 10 != 7")),
    ];
    parts.shuffle(rng);
    let related: Vec<String> = parts.iter().map(|p| p.0.clone()).collect();
    let unrelated: Vec<String> = parts.iter().map(|p| p.1.clone()).collect();
    let add = if rng.gen_bool(0.5) {
        format!("{sum} += {i} * {i};")
    } else {
        format!("{sum} = {sum} + {i} * {i};")
    };
    let mut s = String::from("#include <stdio.h>\n");
    let style = rng.gen_range(0..4);
    if style == 3 {
        let f = ["related", "bad", "check", "is_seven"].choose(rng).unwrap();
        s.push_str(&format!(
            "int {f}(int {i}) {{\n    return {};\n}}\n",
            related.join(" || ")
        ));
        s.push_str(&header(rng).replace("#include <stdio.h>\n", ""));
        s.push_str(&format!("    int {n}, {sum} = 0;\n    scanf(\"%d\", &{n});\n"));
        let bound = if rng.gen_bool(0.7) { format!("{i} <= {n}") } else { format!("{i} < {n} + 1") };
        s.push_str(&format!("    for (int {i} = 1; {bound}; {i}++)\n        if (!{f}({i}))\n            {add}\n"));
    } else {
        s.push_str(&header(rng).replace("#include <stdio.h>\n", ""));
        s.push_str(&format!("    int {n}, {sum} = 0;\n    scanf(\"%d\", &{n});\n"));
        let bound = if rng.gen_bool(0.7) { format!("{i} <= {n}") } else { format!("{i} < {n} + 1") };
        s.push_str(&format!("    for (int {i} = 1; {bound}; {i}++) {{\n"));
        match style {
            0 => s.push_str(&format!("        if ({})\n            {add}\n", unrelated.join(" && "))),
            1 => s.push_str(&format!("        if ({})\n            continue;\n        {add}\n", related.join(" || "))),
            _ => s.push_str(&format!("        if (!({})) {{\n            {add}\n        }}\n", related.join(" || "))),
        }
        s.push_str("    }\n");
    }
    s.push_str(&format!("    printf(\"%d\\n\", {sum});\n"));
    s.push_str(footer(rng));
    s
}

fn tests_seven(_rng: &mut StdRng) -> Vec<(String, String)> {
    [21, 1, 7, 15, 50, 77, 99]
        .iter()
        .map(|&n| {
            let total: i64 = (1..=n)
                .filter(|i| i % 7 != 0 && i % 10 != 7 && i / 10 != 7)
                .map(|i| i * i)
                .sum();
            (format!("{n}\n"), format!("{total}\n"))
        })
        .collect()
}

// ---- 1716: average age -----------------------------------------------------

fn gen_average(rng: &mut StdRng) -> String {
    let mut nm = Names::new();
    let n = nm.pick(rng, &["n", "num", "k", "cnt"]);
    let age = nm.pick(rng, &["age", "x", "a", "t", "v"]);
    let sum = nm.pick(rng, &["sum", "s", "total", "tot"]);
    let i = nm.pick(rng, &["i", "j", "p"]);
    let mut s = header(rng);
    let double_sum = rng.gen_bool(0.3);
    if double_sum {
        s.push_str(&format!("    int {n}, {age};\n    double {sum} = 0;\n"));
    } else {
        s.push_str(&format!("    int {n}, {age}, {sum} = 0;\n"));
    }
    s.push_str(&format!("    scanf(\"%d\", &{n});\n"));
    let add = if rng.gen_bool(0.5) { format!("{sum} += {age};") } else { format!("{sum} = {sum} + {age};") };
    emit_loop(rng, &mut s, i, n, true, &[format!("scanf(\"%d\", &{age});"), add]);
    let expr = if double_sum {
        format!("{sum} / {n}")
    } else {
        match rng.gen_range(0..3) {
            0 => format!("(double) {sum} / {n}"),
            1 => format!("{sum} * 1.0 / {n}"),
            _ => format!("1.0 * {sum} / {n}"),
        }
    };
    if rng.gen_bool(0.4) {
        let avg = nm.pick(rng, &["avg", "mean", "ave", "r"]);
        s.push_str(&format!("    double {avg} = {expr};\n    printf(\"%.2f\\n\", {avg});\n"));
    } else {
        s.push_str(&format!("    printf(\"%.2f\\n\", {expr});\n"));
    }
    s.push_str(footer(rng));
    s
}

fn tests_average(rng: &mut StdRng) -> Vec<(String, String)> {
    let mut cases = vec![vec![18, 17]];
    while cases.len() < 7 {
        let n = rng.gen_range(2..99);
        let v = ints(rng, n, 15, 25);
        let sum: i64 = v.iter().map(|&x| x as i64).sum();
        // Stay clear of exact binary ties at the third decimal.
        if (sum * 1000) % n as i64 == 0 && (sum * 1000 / n as i64) % 10 == 5 {
            continue;
        }
        cases.push(v);
    }
    cases
        .into_iter()
        .map(|v| {
            let n = v.len() as i64;
            let sum: i64 = v.iter().map(|&x| x as i64).sum();
            let q = (sum * 200 + n) / (2 * n);
            let input = format!("{}\n{}\n", n, v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("\n"));
            (input, format!("{}.{:02}\n", q / 100, q % 100))
        })
        .collect()
}

// ---- 1720: is the day free? ------------------------------------------------

fn gen_days(rng: &mut StdRng) -> String {
    let mut nm = Names::new();
    let d = nm.pick(rng, &["d", "day", "n", "x", "a"]);
    let (yes, no) = if rng.gen_bool(0.8) {
        ("printf(\"YES\\n\");", "printf(\"NO\\n\");")
    } else {
        ("puts(\"YES\");", "puts(\"NO\");")
    };
    let mut s = header(rng);
    s.push_str(&format!("    int {d};\n    scanf(\"%d\", &{d});\n"));
    let mut busy = ["1", "3", "5"];
    let mut free = ["2", "4", "6", "7"];
    busy.shuffle(rng);
    free.shuffle(rng);
    let (cond, then_branch, else_branch) = match rng.gen_range(0..4) {
        0 => (busy.iter().map(|k| format!("{d} == {k}")).collect::<Vec<_>>().join(" || "), no, yes),
        1 => (free.iter().map(|k| format!("{d} == {k}")).collect::<Vec<_>>().join(" || "), yes, no),
        2 => {
            if rng.gen_bool(0.5) {
                (format!("{d} % 2 == 1 && {d} != 7"), no, yes)
            } else {
                (format!("{d} % 2 == 0 || {d} == 7"), yes, no)
            }
        }
        _ => (busy.iter().map(|k| format!("{d} != {k}")).collect::<Vec<_>>().join(" && "), yes, no),
    };
    if rng.gen_bool(0.5) {
        s.push_str(&format!("    if ({cond})\n        {then_branch}\n    else\n        {else_branch}\n"));
    } else {
        s.push_str(&format!("    if ({cond}) {{\n        {then_branch}\n    }} else {{\n        {else_branch}\n    }}\n"));
    }
    s.push_str(footer(rng));
    s
}

fn tests_days(_rng: &mut StdRng) -> Vec<(String, String)> {
    (1..=7)
        .map(|d| {
            let ans = if [1, 3, 5].contains(&d) { "NO" } else { "YES" };
            (format!("{d}\n"), format!("{ans}\n"))
        })
        .collect()
}

// ---- corpus building -------------------------------------------------------

pub fn unique_solutions(ex: &Exercise, rng: &mut StdRng, count: usize, avoid: &HashSet<String>) -> Vec<String> {
    let mut seen: HashSet<String> = avoid.clone();
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < count && attempts < count * 200 {
        attempts += 1;
        let src = (ex.generate)(rng);
        // Compare by token stream so layout-only differences do not count.
        let key = tokens_key(&src);
        if seen.insert(key) {
            out.push(src);
        }
    }
    assert_eq!(out.len(), count, "exercise {} could not produce {count} distinct solutions", ex.id);
    out
}

fn tokens_key(src: &str) -> String {
    let ast = parse_source(src, Language::C).unwrap_or_else(|e| panic!("generated source does not parse: {e}\n{src}"));
    token_sequence(&ast).lexemes().join(" ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    OperatorSwap,
    OffByOne,
    DeleteStatement,
}

fn swap_op(op: &str) -> Option<&'static str> {
    Some(match op {
        "<" => "<=",
        "<=" => "<",
        ">" => ">=",
        ">=" => ">",
        "==" => "!=",
        "!=" => "==",
        "&&" => "||",
        "||" => "&&",
        "+" => "-",
        "-" => "+",
        "*" => "+",
        "%" => "/",
        "/" => "%",
        _ => return None,
    })
}

/// Applies one random mutation to `src`, returning the mutated token text.
pub fn mutate(src: &str, rng: &mut StdRng, kind: Mutation) -> Option<String> {
    let ast = parse_source(src, Language::C).ok()?;
    let seq = token_sequence(&ast);
    let mut toks: Vec<Token> = seq.tokens.clone();
    match kind {
        Mutation::OperatorSwap => {
            let sites: Vec<usize> = (0..toks.len())
                .filter(|&k| toks[k].kind == TokenKind::Operator && swap_op(&toks[k].lexeme).is_some())
                .collect();
            let &k = sites.choose(rng)?;
            toks[k] = Token::new(swap_op(&toks[k].lexeme)?, TokenKind::Operator);
        }
        Mutation::OffByOne => {
            let sites: Vec<usize> = (0..toks.len())
                .filter(|&k| toks[k].kind == TokenKind::Literal && toks[k].lexeme.parse::<i64>().is_ok())
                .collect();
            let &k = sites.choose(rng)?;
            let v: i64 = toks[k].lexeme.parse().ok()?;
            let nv = if v == 0 || rng.gen_bool(0.5) { v + 1 } else { v - 1 };
            toks[k] = Token::new(nv.to_string(), TokenKind::Literal);
        }
        Mutation::DeleteStatement => {
            let leaf_index: std::collections::HashMap<usize, usize> =
                seq.leaf_ids.iter().enumerate().map(|(k, &l)| (l, k)).collect();
            let stmts: Vec<(usize, usize)> = ast
                .preorder()
                .into_iter()
                .filter(|&id| ast.node(id).category == Category::ExpressionStatement)
                .map(|id| {
                    let leaves: Vec<usize> = ast_leaves_under(&ast, id).iter().map(|l| leaf_index[l]).collect();
                    (leaves[0], *leaves.last().unwrap() + 1)
                })
                .collect();
            let &(s, e) = stmts.choose(rng)?;
            toks.drain(s..e);
        }
    }
    Some(render(&TokenSequence::from_tokens(toks, "mutant")))
}

fn ast_leaves_under(ast: &tokfix::frontend::Ast, id: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut stack = vec![id];
    while let Some(n) = stack.pop() {
        let node = ast.node(n);
        if node.is_leaf() {
            out.push(n);
        }
        stack.extend(node.children.iter().rev());
    }
    out
}

pub struct SynthCorpus {
    pub problems: Vec<std::path::PathBuf>,
    pub correct_per_problem: usize,
    pub mutants: usize,
}

/// Writes every exercise as a problem directory under `root`, with
/// `correct` verified solutions and `mutants` verified wrong-answer variants
/// of held-out solutions.
pub fn build_corpus(root: &Path, judge: &Judge, seed: u64, correct: usize, mutants: usize, candidate_limit: usize) -> SynthCorpus {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut problems = Vec::new();
    let mut total_mutants = 0;
    for ex in exercises() {
        let dir = root.join(ex.id);
        let tests = (ex.tests)(&mut rng);
        super::write_problem(&dir, &format!("language=c\ncpu_seconds=1\ncandidate_limit={candidate_limit}\n"), &tests);
        let cases: Vec<TestCase> = tests
            .iter()
            .enumerate()
            .map(|(k, (i, o))| TestCase::new((k + 1).to_string(), i.as_bytes(), o.as_bytes()))
            .collect();
        let limits = Limits { cpu_seconds: 1, ..Limits::default() };
        let sols = unique_solutions(&ex, &mut rng, correct, &HashSet::new());
        for (k, src) in sols.iter().enumerate() {
            assert!(
                judge.passes_all(src, Language::C, &cases, limits).unwrap(),
                "generated solution for {} fails its tests:\n{src}",
                ex.id
            );
            fs::write(dir.join(format!("correct/s{k:03}.c")), src).unwrap();
        }
        let avoid: HashSet<String> = sols.iter().map(|s| tokens_key(s)).collect();
        let held_out = unique_solutions(&ex, &mut rng, mutants, &avoid);
        let kinds = [Mutation::OperatorSwap, Mutation::OffByOne, Mutation::DeleteStatement];
        let mut made = 0;
        let mut attempts = 0;
        while made < mutants && attempts < mutants * 30 {
            let base = &held_out[made % held_out.len()];
            let kind = kinds[(made + attempts) % kinds.len()];
            attempts += 1;
            let Some(m) = mutate(base, &mut rng, kind) else { continue };
            let v = judge.judge(&m, Language::C, &cases, limits).unwrap();
            if v.summary() == "WA" {
                fs::write(dir.join(format!("incorrect/m{made:03}.c")), m).unwrap();
                made += 1;
            }
        }
        assert_eq!(made, mutants, "could not make {mutants} wrong-answer mutants for {}", ex.id);
        total_mutants += made;
        problems.push(dir);
    }
    SynthCorpus {
        problems,
        correct_per_problem: correct,
        mutants: total_mutants,
    }
}
