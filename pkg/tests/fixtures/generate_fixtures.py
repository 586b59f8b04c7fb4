#!/usr/bin/env python3
"""Regenerate the checked-in fixture host files.

funnel_host.json: one repo with 10 hand-labeled commits
(3 OK / 2 merge / 3 multi-file / 1 test-file / 1 non-Java).
grid_host.json: one repo with 100 keyword-matching candidate commits plus
30 no-keyword commits for negative sampling.

Run from the repo root: python tests/fixtures/generate_fixtures.py
"""

import json
from pathlib import Path

HERE = Path(__file__).parent


def sha(n: int) -> str:
    return f"{n:040x}"


def java_diff(path: str, n: int) -> str:
    return (f"--- a/{path}\n"
            f"+++ b/{path}\n"
            f"@@ -{10 + n},3 +{10 + n},4 @@ void handle(Request req) {{\n"
            f"     String input = req.param(\"q\");\n"
            f"-    render(input);\n"
            f"+    render(sanitize(input));\n"
            f"+    audit.log(\"handled\", {n});\n"
            f"     return;\n")


def commit(n, message, parents, files, diff="", when=None):
    return {
        "sha": sha(n),
        "message": message,
        "parents": parents,
        "authored_at": when or f"2024-03-{(n % 27) + 1:02d}T10:00:00Z",
        "files": files,
        "diff": diff or java_diff(files[0][0] if files else "src/Main.java", n),
    }


def funnel_repo() -> dict:
    commits = [
        # --- 3 OK ---
        commit(101, "Fix XSS vulnerability in auth handler", 1,
               [["src/main/Auth.java", "modified"]]),
        commit(102, "Prevent SQL injection in crypto lookup", 1,
               [["core/Crypto.java", "modified"]]),
        commit(103, "Escape untrusted output before rendering", 1,
               [["util/Render.java", "added"]]),
        # --- 2 merge ---
        commit(104, "Merge branch 'hotfix' into main", 2,
               [["src/main/Auth.java", "modified"]]),
        commit(105, "Merge pull request #42", 3,
               [["core/Crypto.java", "modified"]]),
        # --- 3 multi-file ---
        commit(106, "Refactor handlers", 1,
               [["a/A.java", "modified"], ["b/B.java", "modified"]]),
        commit(107, "Update docs and code", 1,
               [["a/A.java", "modified"], ["README.md", "modified"]]),
        commit(108, "Empty change set", 1, [], diff="--- a/x\n+++ b/x\n@@ -1,1 +1,1 @@\n-a\n+b\n"),
        # --- 1 test file ---
        commit(109, "Fix flaky overflow assertion", 1,
               [["src/test/AuthTest.java", "modified"]]),
        # --- 1 non-Java ---
        commit(110, "Document the sanitize helper", 1,
               [["docs/setup.md", "modified"]]),
    ]
    return {
        "owner": "acme",
        "name": "widget",
        "language": "Java",
        "pr_count": 120,
        "default_branch": "main",
        "fork": False,
        "commits": commits,
    }


KEYWORD_MESSAGES = [
    "Fix XSS vulnerability in {0}",
    "Prevent SQL injection when reading {0}",
    "Guard against buffer overflow in {0}",
    "Add CSRF token check to {0}",
    "Block path traversal through {0}",
]

CLEAN_MESSAGES = [
    "Refactor {0} for readability",
    "Improve logging in {0}",
    "Rename fields in {0}",
]


def grid_repo() -> dict:
    commits = []
    for i in range(100):
        component = f"module{i % 7}.Handler{i}"
        message = KEYWORD_MESSAGES[i % len(KEYWORD_MESSAGES)].format(component)
        commits.append(commit(
            1000 + i, message, 1,
            [[f"src/main/java/acme/{component.replace('.', '/')}.java", "modified"]]))
    for i in range(30):
        component = f"module{i % 5}.Support{i}"
        message = CLEAN_MESSAGES[i % len(CLEAN_MESSAGES)].format(component)
        commits.append(commit(
            2000 + i, message, 1,
            [[f"src/main/java/acme/{component.replace('.', '/')}.java", "modified"]]))
    return {
        "owner": "acme",
        "name": "vulncorpus",
        "language": "Java",
        "pr_count": 500,
        "default_branch": "main",
        "fork": False,
        "commits": commits,
    }


def main():
    (HERE / "funnel_host.json").write_text(
        json.dumps({"repos": [funnel_repo()]}, indent=1) + "\n")
    (HERE / "grid_host.json").write_text(
        json.dumps({"repos": [grid_repo()]}, indent=1) + "\n")
    print("wrote funnel_host.json and grid_host.json")


if __name__ == "__main__":
    main()
