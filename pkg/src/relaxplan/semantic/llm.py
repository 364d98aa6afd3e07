"""Chat-completion backend speaking an OpenAI-style JSON API over HTTP."""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass
from importlib import resources
from string import Template
from typing import Callable, Sequence, TypeVar

import httpx

from ..checker import FeedbackItem, render_feedback
from ..pddl import DomainAst, PDDLError, ProblemAst, parse_domain, parse_problem, render
from ..scene import DistilledScene
from .base import (
    BackendError,
    GoalSpec,
    RetriesExhausted,
    SemanticBackend,
    UnparseableOutput,
    Verdict,
)

ENV_ENDPOINT = "RELAXPLAN_LLM_ENDPOINT"
ENV_API_KEY = "RELAXPLAN_LLM_API_KEY"
ENV_MODEL = "RELAXPLAN_LLM_MODEL"
DEFAULT_ENDPOINT = "https://api.openai.com/v1/chat/completions"
DEFAULT_MODEL = "gpt-4o"
OPERATOR_HEADER = "X-Relaxplan-Operator"

_FENCE_RE = re.compile(r"```[^\n`]*\n(.*?)```", re.DOTALL)

T = TypeVar("T")


@dataclass(frozen=True)
class LLMConfig:
    endpoint: str = DEFAULT_ENDPOINT
    api_key: str | None = None
    model: str = DEFAULT_MODEL
    temperature: float = 0.0
    timeout: float = 120.0
    max_reprompts: int = 3

    @classmethod
    def from_env(cls, **overrides) -> "LLMConfig":
        env = {
            "endpoint": os.environ.get(ENV_ENDPOINT, DEFAULT_ENDPOINT),
            "api_key": os.environ.get(ENV_API_KEY),
            "model": os.environ.get(ENV_MODEL, DEFAULT_MODEL),
        }
        env.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**env)


def load_prompt(name: str) -> Template:
    text = resources.files(__package__).joinpath("prompts", f"{name}.txt").read_text()
    return Template(text)


def extract_block(text: str) -> str:
    """The body of the single fenced code block in ``text``."""
    blocks = _FENCE_RE.findall(text or "")
    if len(blocks) != 1:
        raise UnparseableOutput(f"expected exactly one fenced code block, found {len(blocks)}", text)
    body = blocks[0].strip()
    if not body:
        raise UnparseableOutput("fenced code block is empty", text)
    return body


def _parse_verdict(body: str) -> Verdict:
    first, _, rest = body.partition("\n")
    word = first.strip().lower().rstrip(".")
    if word not in ("yes", "no"):
        raise UnparseableOutput(f"verdict must start with yes or no, got {first!r}", body)
    return Verdict(word == "yes", rest.strip())


def _parse_goal_text(body: str) -> str:
    text = " ".join(body.split())
    if text.startswith("("):
        raise UnparseableOutput("expected a goal sentence, got PDDL", body)
    return text


class LLMBackend(SemanticBackend):
    name = "llm"

    def __init__(self, config: LLMConfig | None = None, transport: httpx.BaseTransport | None = None):
        self.config = config or LLMConfig.from_env()
        if self.config.max_reprompts < 0:
            raise ValueError("max_reprompts must be >= 0")
        self.model = self.config.model
        headers = {"Content-Type": "application/json"}
        if self.config.api_key:
            headers["Authorization"] = f"Bearer {self.config.api_key}"
        # httpx.Client pools connections and is safe to share between threads
        self._client = httpx.Client(headers=headers, timeout=self.config.timeout, transport=transport)
        self._system = load_prompt("system").template

    def close(self) -> None:
        self._client.close()

    def _complete(self, operator: str, messages: list[dict]) -> str:
        body = {"model": self.config.model, "temperature": self.config.temperature, "messages": messages}
        try:
            resp = self._client.post(self.config.endpoint, json=body, headers={OPERATOR_HEADER: operator})
        except httpx.HTTPError as e:
            raise BackendError(f"transport error: {e}") from e
        if resp.status_code != 200:
            raise BackendError(f"HTTP {resp.status_code}: {resp.text[:200]}", resp.status_code)
        try:
            return resp.json()["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as e:
            raise BackendError(f"malformed completion document: {e}", resp.status_code) from e

    def _ask(self, operator: str, fields: dict, parse: Callable[[str], T]) -> T:
        prompt = load_prompt(operator).substitute(fields)
        messages = [{"role": "system", "content": self._system}, {"role": "user", "content": prompt}]
        attempts = self.config.max_reprompts + 1
        raw, reason = "", ""
        for _ in range(attempts):
            raw = self._complete(operator, messages)
            try:
                return parse(extract_block(raw))
            except UnparseableOutput as e:
                reason = str(e)
            except PDDLError as e:
                reason = f"invalid PDDL: {e}"
            messages.append({"role": "assistant", "content": raw})
            messages.append({"role": "user", "content": load_prompt("reprompt").substitute(error=reason)})
        if self.config.max_reprompts == 0:
            raise UnparseableOutput(reason, raw)
        raise RetriesExhausted(attempts, raw, reason)

    def gen_domain(self, goal: GoalSpec, scene: DistilledScene, desc: str) -> DomainAst:
        if not desc:
            raise ValueError("domain description must be non-empty")
        return self._ask("gen_domain", {"desc": desc, "goal": goal.text, "scene": scene.to_text()}, parse_domain)

    def gen_problem(self, domain: DomainAst, goal: GoalSpec, scene: DistilledScene) -> ProblemAst:
        fields = {"domain": render(domain), "goal": goal.text, "scene": scene.to_text()}
        # closure errors are left for the checker so they become refinement feedback
        return self._ask("gen_problem", fields, lambda t: parse_problem(t, domain, strict=False))

    def refine(self, problem: ProblemAst, domain: DomainAst, goal: GoalSpec, scene: DistilledScene,
               feedback: Sequence[FeedbackItem]) -> ProblemAst:
        if not feedback:
            raise ValueError("refinement needs feedback")
        fields = {
            "feedback": render_feedback(list(feedback)),
            "domain": render(domain),
            "problem": render(problem),
            "scene": scene.to_text(),
            "goal": goal.text,
        }
        return self._ask("refine", fields, lambda t: parse_problem(t, domain, strict=False))

    def shift_goal(self, goal: GoalSpec, scene: DistilledScene) -> GoalSpec:
        text = self._ask("shift_goal", {"goal": goal.text, "scene": scene.to_text()}, _parse_goal_text)
        return goal.shifted(text=text, formula=None)

    def relax_goal(self, goal: GoalSpec, scene: DistilledScene) -> GoalSpec:
        text = self._ask("relax_goal", {"goal": goal.text, "scene": scene.to_text()}, _parse_goal_text)
        return goal.relaxed(text=text, formula=None)

    def possibility_check(self, goal: GoalSpec, scene: DistilledScene) -> Verdict:
        return self._ask("possibility", {"goal": goal.text, "scene": scene.to_text()}, _parse_verdict)


def replay_transport(responses: Sequence[str]) -> httpx.MockTransport:
    """Transport that answers successive requests with recorded completion texts."""
    queue = list(responses)
    log: list[dict] = []

    def handler(request: httpx.Request) -> httpx.Response:
        log.append({"operator": request.headers.get(OPERATOR_HEADER), "body": json.loads(request.content)})
        if not queue:
            return httpx.Response(500, text="replay exhausted")
        content = queue.pop(0)
        return httpx.Response(200, json={"choices": [{"message": {"role": "assistant", "content": content}}]})

    transport = httpx.MockTransport(handler)
    transport.log = log  # type: ignore[attr-defined]
    return transport
