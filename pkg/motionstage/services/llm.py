"""Language-model clients for plot writing and order extraction.

Every client speaks through ``complete(prompt) -> str``; the three plot
operations fill the packaged prompt templates and route through it, logging
each request and response. ``RetryingLlmClient`` adds the retry policy to
any client, ``MockLlmClient`` answers from canned files.
"""

import logging
import time
from importlib import resources
from typing import Callable, Dict, List, Optional, Protocol, Sequence

import anthropic
import httpx

from ..config import Settings
from ..errors import ClientError

logger = logging.getLogger(__name__)

OBJECTS_PLACEHOLDER = "OBJECT NAMES IN THE 3D SCENE"
PLOT_PLACEHOLDER = "PLOT CONTEXT"
ORDER_PLACEHOLDERS = ("ORDER FOR CHARACTER 1", "ORDER FOR CHARACTER 2")
ANTHROPIC_MAX_TOKENS = 4096


def load_prompt(name: str) -> str:
    return resources.files("motionstage.data").joinpath("prompts", f"{name}.txt").read_text(encoding="utf-8")


def render_plot_prompt(object_names: Sequence[str], with_rules: bool = False) -> str:
    prompt = load_prompt("plot").replace(OBJECTS_PLACEHOLDER, ", ".join(object_names))
    if with_rules:
        prompt = prompt.rstrip("\n") + "\n\n" + load_prompt("rules")
    return prompt


def render_orders_prompt(plot: str) -> str:
    return load_prompt("orders").replace(PLOT_PLACEHOLDER, plot.strip())


def render_revise_prompt(orders: str) -> str:
    lines = [line.strip() for line in orders.splitlines() if line.strip()]
    prompt = load_prompt("revise")
    for placeholder, line in zip(ORDER_PLACEHOLDERS, lines + ["[]"] * len(ORDER_PLACEHOLDERS)):
        prompt = prompt.replace(placeholder, line)
    return prompt.rstrip("\n") + "\n\n" + load_prompt("rules")


class LlmClient(Protocol):
    def generate_plot(self, catalog, with_rules: bool = False) -> str: ...

    def extract_orders(self, plot: str) -> str: ...

    def revise_orders(self, orders: str) -> str: ...


class PromptedLlmClient:
    """Base for clients that answer a single text prompt."""

    def complete(self, prompt: str) -> str:
        raise NotImplementedError

    def _ask(self, purpose: str, prompt: str) -> str:
        logger.info("llm %s request: %d chars", purpose, len(prompt))
        logger.debug("llm %s prompt:\n%s", purpose, prompt)
        response = self.complete(prompt)
        logger.info("llm %s response: %d chars", purpose, len(response))
        logger.debug("llm %s response:\n%s", purpose, response)
        return response

    def generate_plot(self, catalog, with_rules: bool = False) -> str:
        return self._ask("plot", render_plot_prompt(catalog.names, with_rules))

    def extract_orders(self, plot: str) -> str:
        return self._ask("orders", render_orders_prompt(plot))

    def revise_orders(self, orders: str) -> str:
        return self._ask("revise", render_revise_prompt(orders))


class HttpLlmClient(PromptedLlmClient):
    """Provider-agnostic endpoint: POST ``{"model", "prompt"}`` as JSON, plain-text answer."""

    def __init__(
        self,
        endpoint: str,
        token: str = "",
        model: str = "",
        timeout: float = 30.0,
        transport: Optional[httpx.BaseTransport] = None,
    ):
        if not endpoint:
            raise ClientError("LLM_ENDPOINT is not set")
        self.endpoint = endpoint
        self.model = model
        headers = {"Authorization": f"Bearer {token}"} if token else {}
        self.http = httpx.Client(headers=headers, timeout=timeout, transport=transport)

    def complete(self, prompt: str) -> str:
        try:
            response = self.http.post(self.endpoint, json={"model": self.model, "prompt": prompt})
            response.raise_for_status()
        except httpx.HTTPError as exc:
            raise ClientError(f"LLM request to {self.endpoint} failed: {exc}") from exc
        return response.text


class AnthropicLlmClient(PromptedLlmClient):
    def __init__(self, api_key: str, model: str, timeout: float = 30.0):
        if not model:
            raise ClientError("LLM_MODEL is not set")
        self.model = model
        self.client = anthropic.Anthropic(api_key=api_key or None, timeout=timeout)

    def complete(self, prompt: str) -> str:
        try:
            message = self.client.messages.create(
                model=self.model,
                max_tokens=ANTHROPIC_MAX_TOKENS,
                messages=[{"role": "user", "content": prompt}],
            )
        except anthropic.APIError as exc:
            raise ClientError(f"Anthropic request failed: {exc}") from exc
        return "".join(block.text for block in message.content if block.type == "text")


class RetryingLlmClient(PromptedLlmClient):
    """Retries ``ClientError`` with exponential backoff; the last error surfaces after exhaustion."""

    def __init__(
        self,
        inner: PromptedLlmClient,
        max_attempts: int = 3,
        backoff_seconds: float = 0.5,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.inner = inner
        self.max_attempts = max(1, max_attempts)
        self.backoff_seconds = backoff_seconds
        self.sleep = sleep

    def complete(self, prompt: str) -> str:
        last: Optional[ClientError] = None
        for attempt in range(1, self.max_attempts + 1):
            try:
                return self.inner.complete(prompt)
            except ClientError as exc:
                last = exc
                if attempt == self.max_attempts:
                    break
                delay = self.backoff_seconds * 2 ** (attempt - 1)
                logger.warning("llm attempt %d/%d failed (%s); retrying in %.2fs", attempt, self.max_attempts, exc.detail, delay)
                self.sleep(delay)
        raise ClientError(f"LLM unavailable after {self.max_attempts} attempts: {last.detail}")


class MockLlmClient(PromptedLlmClient):
    """Deterministic stand-in: canned answers per operation, or the prompt itself with ``echo``."""

    def __init__(self, responses: Optional[Dict[str, str]] = None, echo: bool = False):
        self.echo = echo
        self.responses = responses or {
            "plot": load_prompt("mock_plot"),
            "orders": load_prompt("mock_orders"),
            "revise": load_prompt("mock_revised"),
        }
        self.prompts: List[str] = []

    def complete(self, prompt: str) -> str:
        return prompt

    def _ask(self, purpose: str, prompt: str) -> str:
        self.prompts.append(prompt)
        logger.info("llm %s request (mock): %d chars", purpose, len(prompt))
        logger.debug("llm %s prompt:\n%s", purpose, prompt)
        return prompt if self.echo else self.responses[purpose]


def build_client(config: Settings, mock: bool = False) -> PromptedLlmClient:
    """Client selected by settings, wrapped in the retry policy; the mock when ``mock`` is set."""
    if mock:
        return MockLlmClient()
    if config.llm_backend == "anthropic":
        inner = AnthropicLlmClient(config.llm_token, config.llm_model, config.llm_timeout_seconds)
    else:
        inner = HttpLlmClient(config.llm_endpoint, config.llm_token, config.llm_model, config.llm_timeout_seconds)
    return RetryingLlmClient(inner, config.llm_max_attempts, config.llm_backoff_seconds)
