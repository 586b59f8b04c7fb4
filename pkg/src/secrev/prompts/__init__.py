"""Strategy-tagged prompt templates and rendering.

Templates live as data files (front-matter header, then one body block per
turn separated by "---" lines) so prompt iteration is a data change, not a
code change. Rendering is literal substitution: no escaping, no recursive
expansion, no truncation.
"""

import hashlib
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from secrev.errors import MissingPlaceholderValue, UnknownPlaceholder

STRATEGIES = ("zero_shot", "chain_of_thought", "self_reflection")

PLACEHOLDER_RE = re.compile(r"\{\{([A-Za-z]+)\}\}")
KNOWN_PLACEHOLDERS = ("Diff", "Message", "PriorResponse")

PRIOR_RESPONSE = "{{PriorResponse}}"


def list_strategies() -> list[str]:
    """The three prompting strategies, stable order."""
    return list(STRATEGIES)


@dataclass(frozen=True)
class PromptTemplate:
    strategy: str
    version: str
    turns: tuple[str, ...]
    version_hash: str  # sha256 of the raw template file bytes

    @property
    def version_tag(self) -> str:
        """Stamped into every generation result; changes with any byte edit."""
        return f"{self.strategy}/{self.version}+{self.version_hash[:12]}"

    def validate(self) -> None:
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        expected_turns = 2 if self.strategy == "self_reflection" else 1
        if len(self.turns) != expected_turns:
            raise ValueError(
                f"{self.strategy} template must have {expected_turns} turn(s), "
                f"got {len(self.turns)}")
        for turn_index, turn in enumerate(self.turns):
            for match in PLACEHOLDER_RE.finditer(turn):
                if match.group(1) not in KNOWN_PLACEHOLDERS:
                    raise UnknownPlaceholder(
                        f"turn {turn_index + 1} uses unknown placeholder "
                        f"{{{{{match.group(1)}}}}}")
        first = self.turns[0]
        if "{{Diff}}" not in first or "{{Message}}" not in first:
            raise ValueError("turn 1 must contain both {{Diff}} and {{Message}}")
        if self.strategy == "self_reflection" and PRIOR_RESPONSE not in self.turns[1]:
            raise ValueError("self_reflection turn 2 must contain {{PriorResponse}}")


def parse_template(raw: str) -> PromptTemplate:
    """Parse a template file: "key: value" front matter, then "---"-separated
    turn bodies."""
    lines = raw.split("\n")
    header: dict[str, str] = {}
    body_start = None
    for i, line in enumerate(lines):
        if line.strip() == "---":
            body_start = i + 1
            break
        if ":" in line:
            key, _, value = line.partition(":")
            header[key.strip()] = value.strip()
    if body_start is None:
        raise ValueError("template missing '---' separator after front matter")
    turns: list[str] = []
    block: list[str] = []
    for line in lines[body_start:]:
        if line.strip() == "---":
            turns.append("\n".join(block).strip("\n"))
            block = []
        else:
            block.append(line)
    turns.append("\n".join(block).strip("\n"))
    template = PromptTemplate(
        strategy=header.get("strategy", ""),
        version=header.get("version", "v0"),
        turns=tuple(turns),
        version_hash=hashlib.sha256(raw.encode("utf-8")).hexdigest(),
    )
    template.validate()
    return template


def load_template_file(path: str | Path) -> PromptTemplate:
    return parse_template(Path(path).read_text(encoding="utf-8"))


def load_templates(directory: str | Path | None = None) -> dict[str, PromptTemplate]:
    """Load all templates from a directory (default: the packaged set);
    returns strategy -> template."""
    templates: dict[str, PromptTemplate] = {}
    if directory is None:
        root = resources.files("secrev.prompts").joinpath("data")
        raws = [(entry.name, entry.read_text(encoding="utf-8"))
                for entry in root.iterdir() if entry.name.endswith(".txt")]
    else:
        raws = [(p.name, p.read_text(encoding="utf-8"))
                for p in sorted(Path(directory).glob("*.txt"))]
    for name, raw in sorted(raws):
        template = parse_template(raw)
        if template.strategy in templates:
            raise ValueError(f"duplicate template for strategy {template.strategy} ({name})")
        templates[template.strategy] = template
    return templates


def _fill(turn: str, values: dict[str, str], turn_no: int) -> str:
    # single-pass literal substitution; placeholder-like text inside the
    # substituted values is never re-expanded
    def replace(match: re.Match) -> str:
        name = match.group(1)
        if name not in KNOWN_PLACEHOLDERS:
            raise UnknownPlaceholder(f"turn {turn_no}: unknown placeholder {{{{{name}}}}}")
        if name not in values:
            raise MissingPlaceholderValue(f"turn {turn_no}: no value for {{{{{name}}}}}")
        return values[name]

    return PLACEHOLDER_RE.sub(replace, turn)


def render_turn(template: PromptTemplate, turn_index: int, diff: str, message: str,
                prior_response: str | None = None) -> str:
    """Render a single turn (0-based); turn 2 of self_reflection requires the
    model's prior response."""
    if not diff:
        raise MissingPlaceholderValue("diff must be non-empty")
    if not message:
        raise MissingPlaceholderValue("message must be non-empty")
    turn = template.turns[turn_index]
    values = {"Diff": diff, "Message": message}
    if prior_response is not None:
        values["PriorResponse"] = prior_response
    return _fill(turn, values, turn_index + 1)


def render(template: PromptTemplate, diff: str, message: str,
           prior_response: str | None = None) -> list[str]:
    """Render as many turns as the available inputs allow.

    Without prior_response only turn 1 is rendered; supplying it on a
    single-turn template is a misuse error.
    """
    if prior_response is not None and len(template.turns) == 1:
        raise MissingPlaceholderValue(
            f"{template.strategy} has a single turn; prior_response is not consumed")
    rendered = [render_turn(template, 0, diff, message)]
    if len(template.turns) > 1 and prior_response is not None:
        rendered.append(render_turn(template, 1, diff, message, prior_response))
    return rendered


def render_plan(template: PromptTemplate, diff: str, message: str) -> list[str]:
    """Render every turn, leaving {{PriorResponse}} intact in later turns for
    the gateway to fill once the earlier turn's response exists."""
    plan = [render_turn(template, 0, diff, message)]
    for i in range(1, len(template.turns)):
        plan.append(render_turn(template, i, diff, message,
                                prior_response=PRIOR_RESPONSE))
    return plan


def fill_prior_response(turn_text: str, prior_response: str) -> str:
    """Substitute the prior model response into a planned turn."""
    return turn_text.replace(PRIOR_RESPONSE, prior_response)
