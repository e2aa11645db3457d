"""Evaluation harness: navigation cost, quiz scoring, NCS, rank tests.

``min_steps`` measures how many actions (opening an overview, following
a link, or posing one open question when the profile allows it) separate
the entry page from a quiz answer, with 0 for answers sitting on the
entry page and -1 for unreachable ones. Quiz logs are scored 0/1 per
question, cohorts are cleaned with the fewer-than-one-correct attention
check, need-for-cognition scores are summed from the six-item
questionnaire and filtered to the interquartile "normal" band, and group
comparisons use one-sided Mann-Whitney U tests (exact by enumeration for
small samples, normal approximation with tie correction otherwise).
"""

from __future__ import annotations

import itertools
import json
import math
from collections import deque
from dataclasses import dataclass
from pathlib import Path

from .bundle import Bundle
from .errors import ValidationError
from .graph import LabelMatcher

EXACT_LIMIT = 12


@dataclass
class QuizItem:
    question: str
    types: list[str]
    answer_location: dict  # {"kind": entry|node|paragraph|unreachable, ...}
    choices: list[str]
    correct: str


@dataclass
class ParticipantLog:
    participant: str
    tool: str
    answers: dict[str, str]  # question index (as string) -> choice
    elapsed_seconds: float | None = None
    ncs_responses: list[int] | None = None
    satisfaction: float | None = None


def load_quiz(path) -> list[QuizItem]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    items = []
    for i, entry in enumerate(data):
        try:
            location = entry["answer_location"]
            if isinstance(location, str):
                location = {"kind": location}
            items.append(
                QuizItem(
                    question=entry["question"],
                    types=list(entry.get("types", [])),
                    answer_location=location,
                    choices=list(entry.get("choices", [])),
                    correct=entry["correct"],
                )
            )
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"quiz item {i}: missing field {exc}") from exc
    return items


def load_logs(path) -> list[ParticipantLog]:
    logs = []
    for lineno, line in enumerate(
        Path(path).read_text(encoding="utf-8").splitlines(), start=1
    ):
        if not line.strip():
            continue
        try:
            data = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"logs line {lineno}: invalid JSON ({exc})") from exc
        logs.append(
            ParticipantLog(
                participant=str(data["participant"]),
                tool=data["tool"],
                answers={str(k): v for k, v in data.get("answers", {}).items()},
                elapsed_seconds=data.get("elapsed_seconds"),
                ncs_responses=data.get("ncs"),
                satisfaction=data.get("satisfaction"),
            )
        )
    return logs


# -- navigation cost ------------------------------------------------------


def _graph_distances(bundle: Bundle) -> dict[str, int]:
    """BFS from the entry over the bundle's action graph; entry is depth 0."""
    adj = bundle.action_graph()
    dist = {"entry": 0}
    queue = deque(["entry"])
    while queue:
        cur = queue.popleft()
        for nxt in adj.get(cur, ()):
            if nxt not in dist:
                dist[nxt] = dist[cur] + 1
                queue.append(nxt)
    return dist

def _entry_text(bundle: Bundle) -> str:
    return "\n".join(block["text"] for block in bundle.es.entry.blocks)


def _oqa_sources(bundle: Bundle, question: str):
    """Nodes surfaced by one open question: direct triple endpoints plus
    any surviving concept mentioned in a returned snippet."""
    if not question or not bundle.open_qa_enabled():
        return []
    try:
        results = bundle.answer_open_question(question)
    except ValidationError:
        return []
    uris = []
    triples = {t.triple_id: t for t in bundle.kg.triples}
    for snip in results:
        triple = triples.get(snip.source_triple)
        if triple:
            for uri in (triple.subj, triple.obj):
                if uri in bundle.es.nodes and uri not in uris:
                    uris.append(uri)
        for _, _, uri in bundle.annotate(snip.snippet).links:
            if uri not in uris:
                uris.append(uri)
    return uris, results


def min_steps(bundle: Bundle, item: QuizItem) -> int:
    """Minimum number of actions from the entry page to the answer.

    Static bundles (profile ``ose``) offer exactly one action: opening a
    second-level document, so anything mentioned in the corpus is one
    step away. Interactive bundles walk the card graph; when the profile
    allows open question answering, posing the item's question counts as
    one step and its results become jumping-off points.
    """
    kind = item.answer_location.get("kind")
    if kind == "entry":
        return 0
    if kind == "unreachable":
        return -1

    static = bundle.profile == "ose"
    entry_text = _entry_text(bundle)

    if kind == "node":
        target = item.answer_location["uri"]
        if static:
            matcher = LabelMatcher(bundle.kg, [target] if target in bundle.kg.concepts else [])
            if matcher.patterns and matcher.annotate(entry_text).links:
                return 0
            concept = bundle.kg.concepts.get(target)
            if concept and concept.source_mentions:
                return 1
            return -1
        best = None
        dist = _graph_distances(bundle)
        if target in dist:
            best = dist[target]
        oqa = _oqa_sources(bundle, item.question)
        if oqa:
            uris, _ = oqa
            if target in uris:
                best = 1 if best is None else min(best, 1)
        return -1 if best is None else best

    if kind == "paragraph":
        target = item.answer_location["paragraph"]
        entry_pars = {block["paragraph_id"] for block in bundle.es.entry.blocks}
        if target in entry_pars:
            return 0
        if static:
            known = {p["paragraph_id"] for doc in bundle.documents
                     for p in doc["paragraphs"]}
            return 1 if target in known else -1
        best = None
        dist = _graph_distances(bundle)
        for uri, card in bundle.es.nodes.items():
            shows_target = any(
                unit.context == target
                for section in card.sections.values()
                for unit in section["units"]
            )
            if shows_target and uri in dist:
                best = dist[uri] if best is None else min(best, dist[uri])
        oqa = _oqa_sources(bundle, item.question)
        if oqa:
            _, results = oqa
            if any(snip.context == target for snip in results):
                best = 1 if best is None else min(best, 1)
        return -1 if best is None else best

    raise ValidationError(f"unknown answer_location kind {kind!r}")


# -- quiz scoring ---------------------------------------------------------


def score_quiz(log: ParticipantLog, key: list[QuizItem]) -> dict:
    """0/1 per question plus the total and fraction."""
    per_question = []
    for i, item in enumerate(key):
        given = log.answers.get(str(i))
        per_question.append(1 if given is not None and given == item.correct else 0)
    total = sum(per_question)
    return {
        "per_question": per_question,
        "total": total,
        "fraction": total / len(key) if key else 0.0,
    }


def attention_check(log: ParticipantLog, key: list[QuizItem]) -> str:
    """Participants with fewer than one correct answer are discarded."""
    return "discard" if score_quiz(log, key)["total"] < 1 else "pass"


# -- need for cognition ---------------------------------------------------


def ncs_score(responses) -> int:
    """Sum the six-item questionnaire: items 3 and 4 count negatively."""
    responses = list(responses)
    if len(responses) != 6:
        raise ValidationError(f"expected 6 responses, got {len(responses)}")
    for r in responses:
        if not isinstance(r, int) or not 1 <= r <= 5:
            raise ValidationError(f"response {r!r} outside 1..5")
    r1, r2, r3, r4, r5, r6 = responses
    return r1 + r2 + r5 + r6 + (r3 - 6) + (r4 - 6)


def quartiles(scores) -> tuple[float, float, float]:
    """Linear-interpolation quartiles (the h = (n-1)q convention)."""
    if not scores:
        raise ValidationError("no scores")
    ordered = sorted(scores)
    n = len(ordered)

    def at(q):
        h = (n - 1) * q
        lo = math.floor(h)
        hi = math.ceil(h)
        return ordered[lo] + (ordered[hi] - ordered[lo]) * (h - lo)

    return at(0.25), at(0.5), at(0.75)


def normal_ncs_filter(scores) -> tuple[list, tuple[float, float, float]]:
    """Keep the scores inside the cohort's interquartile range, inclusive."""
    q1, median, q3 = quartiles(scores)
    kept = [s for s in scores if q1 <= s <= q3]
    return kept, (q1, median, q3)


# -- Mann-Whitney U -------------------------------------------------------


def _midranks(values) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = rank
        i = j + 1
    return ranks


def _u_statistic(a, b) -> float:
    pooled = list(a) + list(b)
    ranks = _midranks(pooled)
    r1 = sum(ranks[: len(a)])
    return r1 - len(a) * (len(a) + 1) / 2


def _norm_cdf(z: float) -> float:
    return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))


def mann_whitney_u(a, b, alternative: str = "less") -> tuple[float, float]:
    """One-sided Mann-Whitney U test with midrank ties.

    Returns (U of the first sample, p). Exact p comes from enumerating
    every assignment of the pooled values when the samples are small
    (combined size <= 12); larger samples use the normal approximation
    with tie correction and continuity correction.
    """
    a = list(a)
    b = list(b)
    if not a or not b:
        raise ValidationError("both samples must be non-empty")
    if alternative not in ("less", "greater"):
        raise ValidationError(f"unknown alternative {alternative!r}")
    u_obs = _u_statistic(a, b)
    n1, n2 = len(a), len(b)
    n = n1 + n2

    if n <= EXACT_LIMIT:
        pooled = a + b
        total = 0
        hits = 0
        eps = 1e-9
        for combo in itertools.combinations(range(n), n1):
            in_a = set(combo)
            sample_a = [pooled[i] for i in combo]
            sample_b = [pooled[i] for i in range(n) if i not in in_a]
            u = sum(
                1.0 if x > y else 0.5 if x == y else 0.0
                for x in sample_a
                for y in sample_b
            )
            total += 1
            if alternative == "less" and u <= u_obs + eps:
                hits += 1
            elif alternative == "greater" and u >= u_obs - eps:
                hits += 1
        return u_obs, hits / total

    ranks = _midranks(a + b)
    counts: dict[float, int] = {}
    for r in ranks:
        counts[r] = counts.get(r, 0) + 1
    tie_term = sum(c**3 - c for c in counts.values())
    mu = n1 * n2 / 2
    var = n1 * n2 / 12 * ((n + 1) - tie_term / (n * (n - 1)))
    if var <= 0:
        return u_obs, 1.0
    sigma = math.sqrt(var)
    if alternative == "less":
        z = (u_obs - mu + 0.5) / sigma
        return u_obs, _norm_cdf(z)
    z = (u_obs - mu - 0.5) / sigma
    return u_obs, 1.0 - _norm_cdf(z)


# -- report ---------------------------------------------------------------

TOOL_ORDER = ("ose", "hwn", "yai4hu")


def evaluate(bundle: Bundle, quiz: list[QuizItem],
             logs: list[ParticipantLog] | None = None) -> dict:
    """Full evaluation report for one bundle and quiz (logs optional)."""
    questions = []
    for item in quiz:
        steps = min_steps(bundle, item)
        questions.append(
            {
                "question": item.question,
                "types": item.types,
                "min_steps": steps,
                "reachable": steps >= 0,
            }
        )
    report = {
        "profile": bundle.profile,
        "bundle_hash": bundle.bundle_hash,
        "questions": questions,
    }
    if logs is None:
        return report

    participants = []
    ncs_values = []
    for log_entry in logs:
        scored = score_quiz(log_entry, quiz)
        verdict = attention_check(log_entry, quiz)
        entry = {
            "participant": log_entry.participant,
            "tool": log_entry.tool,
            "effectiveness": scored["total"],
            "fraction": scored["fraction"],
            "attention_check": verdict,
            "elapsed_seconds": log_entry.elapsed_seconds,
            "satisfaction": log_entry.satisfaction,
        }
        if log_entry.ncs_responses is not None:
            entry["ncs"] = ncs_score(log_entry.ncs_responses)
            if verdict == "pass":
                ncs_values.append(entry["ncs"])
        participants.append(entry)
    report["participants"] = participants
    report["attention"] = {
        "respondents": len(logs),
        "passed": sum(1 for p in participants if p["attention_check"] == "pass"),
    }

    if ncs_values:
        kept, (q1, median, q3) = normal_ncs_filter(ncs_values)
        report["ncs"] = {
            "count": len(ncs_values),
            "q1": q1,
            "median": median,
            "q3": q3,
            "normal_count": len(kept),
        }
        normal = {p["participant"] for p in participants
                  if p.get("ncs") is not None and q1 <= p["ncs"] <= q3
                  and p["attention_check"] == "pass"}
    else:
        normal = {p["participant"] for p in participants
                  if p["attention_check"] == "pass"}

    groups: dict[str, list[int]] = {}
    for p in participants:
        if p["attention_check"] == "pass" and p["participant"] in normal:
            groups.setdefault(p["tool"], []).append(p["effectiveness"])
    tests = []
    ordered = [t for t in TOOL_ORDER if t in groups] + sorted(
        t for t in groups if t not in TOOL_ORDER
    )
    for i, low in enumerate(ordered):
        for high in ordered[i + 1 :]:
            if groups[low] and groups[high]:
                u, p = mann_whitney_u(groups[low], groups[high], "less")
                tests.append(
                    {
                        "comparison": f"{low} < {high}",
                        "measure": "effectiveness",
                        "u": u,
                        "p": p,
                        "n": [len(groups[low]), len(groups[high])],
                    }
                )
    report["mann_whitney"] = tests
    report["groups"] = {tool: sorted(vals) for tool, vals in groups.items()}
    return report


def format_report_table(report: dict) -> str:
    """Aligned text table next to the JSON report."""
    lines = []
    header = f"{'steps':>6}  {'reach':>5}  question"
    lines.append(header)
    lines.append("-" * len(header))
    for q in report["questions"]:
        lines.append(
            f"{q['min_steps']:>6}  {str(q['reachable']):>5}  {q['question']}"
        )
    if "attention" in report:
        att = report["attention"]
        lines.append("")
        lines.append(
            f"respondents: {att['respondents']}  passed check: {att['passed']}"
        )
    if "ncs" in report:
        ncs = report["ncs"]
        lines.append(
            f"NCS: n={ncs['count']} Q1={ncs['q1']} median={ncs['median']} "
            f"Q3={ncs['q3']} normal={ncs['normal_count']}"
        )
    for test in report.get("mann_whitney", []):
        lines.append(
            f"MW {test['comparison']}: U={test['u']} p={test['p']:.4f} "
            f"n={test['n']}"
        )
    return "\n".join(lines)
