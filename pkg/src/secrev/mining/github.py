"""GitHub REST client implementing the host-backend interface.

Paginated JSON over HTTPS with a shared token bucket, retry-after honoring,
and fork exclusion. PR counts are read from the issue-search counter
(open + closed), which is what repository activity means here.
"""

import logging
import os
import time
from typing import Iterator

import httpx

from secrev.errors import (
    AuthError,
    CommitNotFound,
    DiffTooLarge,
    HostUnavailable,
    RateLimited,
    RepoGone,
)
from secrev.mining.types import ChangedFile, CommitRecord, RepoRecord, parse_utc
from secrev.ratelimit import TokenBucket

logger = logging.getLogger(__name__)

_KIND_MAP = {
    "added": "added",
    "modified": "modified",
    "removed": "deleted",
    "renamed": "renamed",
    "changed": "modified",
    "copied": "added",
    "unchanged": "modified",
}


class GitHubHost:
    host_id = "github"

    def __init__(
        self,
        base_url: str = "https://api.github.com",
        token_env: str = "GITHUB_TOKEN",
        requests_per_minute: int = 30,
        exclude_forks: bool = True,
        diff_byte_cap: int = 1 << 20,
        max_retries: int = 5,
        per_page: int = 100,
        transport: httpx.BaseTransport | None = None,
        sleep=time.sleep,
    ):
        token = os.environ.get(token_env, "")
        headers = {"Accept": "application/vnd.github+json"}
        if token:
            headers["Authorization"] = f"Bearer {token}"
        self._client = httpx.Client(base_url=base_url, headers=headers,
                                    timeout=30.0, transport=transport)
        self.exclude_forks = exclude_forks
        self.diff_byte_cap = diff_byte_cap
        self.max_retries = max_retries
        self.per_page = per_page
        self._bucket = TokenBucket(requests_per_minute, sleep=sleep)
        self._sleep = sleep

    # --- request plumbing ---

    def _raise_for_status(self, response: httpx.Response, not_found):
        status = response.status_code
        if status == 401:
            raise AuthError("GitHub rejected the credentials (HTTP 401)")
        if status in (403, 429):
            retry_after = response.headers.get("Retry-After")
            if retry_after is not None:
                raise RateLimited("GitHub rate limit", retry_after=float(retry_after))
            if response.headers.get("X-RateLimit-Remaining") == "0":
                reset = float(response.headers.get("X-RateLimit-Reset", "0"))
                raise RateLimited("GitHub rate limit",
                                  retry_after=max(0.0, reset - time.time()))
            raise AuthError(f"GitHub denied the request (HTTP {status})")
        if status == 404:
            raise not_found
        if status >= 500:
            raise HostUnavailable(f"GitHub HTTP {status}")

    def _get(self, path: str, params: dict | None = None,
             headers: dict | None = None, not_found=None) -> httpx.Response:
        not_found = not_found or RepoGone(path)
        for attempt in range(self.max_retries + 1):
            self._bucket.acquire()
            try:
                response = self._client.get(path, params=params, headers=headers)
            except httpx.HTTPError as exc:
                if attempt == self.max_retries:
                    raise HostUnavailable(f"GitHub unreachable: {exc}") from exc
                self._sleep(0.5 * 2 ** attempt)
                continue
            try:
                self._raise_for_status(response, not_found)
            except RateLimited as exc:
                if attempt == self.max_retries:
                    raise
                wait = exc.retry_after if exc.retry_after is not None else 0.5 * 2 ** attempt
                self._bucket.penalize(wait)
                self._sleep(wait)
                continue
            except HostUnavailable:
                if attempt == self.max_retries:
                    raise
                self._sleep(0.5 * 2 ** attempt)
                continue
            return response
        raise HostUnavailable(path)  # pragma: no cover - loop always returns/raises

    def _paginate(self, path: str, params: dict,
                  page_limit: int | None = None) -> Iterator[dict]:
        page = 1
        while page_limit is None or page <= page_limit:
            response = self._get(path, params={**params, "per_page": self.per_page,
                                               "page": page})
            body = response.json()
            items = body.get("items", body) if isinstance(body, dict) else body
            if not items:
                return
            yield from items
            if len(items) < self.per_page:
                return
            page += 1

    # --- host interface ---

    def pr_count(self, owner: str, name: str) -> int:
        response = self._get("/search/issues",
                             params={"q": f"repo:{owner}/{name} type:pr",
                                     "per_page": 1},
                             not_found=RepoGone(f"{owner}/{name}"))
        return int(response.json().get("total_count", 0))

    def discover_repos(self, language: str, min_pr_count: int,
                       page_limit: int | None = None) -> Iterator[RepoRecord]:
        query = f"language:{language}"
        if self.exclude_forks:
            query += " fork:false"
        seen: set[tuple[str, str]] = set()
        for item in self._paginate("/search/repositories",
                                   {"q": query, "sort": "stars", "order": "desc"},
                                   page_limit=page_limit):
            owner = item["owner"]["login"]
            name = item["name"]
            if (owner, name) in seen:
                continue
            seen.add((owner, name))
            count = self.pr_count(owner, name)
            if count < min_pr_count:
                continue
            yield RepoRecord(
                host_id=self.host_id,
                owner=owner,
                name=name,
                primary_language=language,
                pr_count=count,
                default_branch=item.get("default_branch", "main"),
            )

    def enumerate_commits(self, repo: RepoRecord) -> Iterator[CommitRecord]:
        path = f"/repos/{repo.owner}/{repo.name}/commits"
        for item in self._paginate(path, {}):
            sha = item["sha"]
            detail = self._get(f"{path}/{sha}",
                               not_found=CommitNotFound(sha)).json()
            files = tuple(
                ChangedFile(f["filename"], _KIND_MAP.get(f.get("status", "modified"),
                                                         "modified"))
                for f in detail.get("files", [])
            )
            yield CommitRecord(
                repo=repo.full_name,
                sha=sha,
                message=item["commit"]["message"],
                parent_count=len(item.get("parents", [])),
                changed_files=files,
                authored_at=parse_utc(item["commit"]["author"]["date"]),
            )

    def fetch_commit_diff(self, repo: RepoRecord, sha: str) -> str:
        response = self._get(
            f"/repos/{repo.owner}/{repo.name}/commits/{sha}",
            headers={"Accept": "application/vnd.github.diff"},
            not_found=CommitNotFound(sha),
        )
        text = response.text
        size = len(text.encode("utf-8"))
        if size > self.diff_byte_cap:
            raise DiffTooLarge(f"{sha} diff is {size} bytes",
                               size=size, cap=self.diff_byte_cap)
        return text
