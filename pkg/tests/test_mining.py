"""Mining tests: fixture host semantics, GitHub client against a scripted
transport, record store resumability."""

import json
import threading

import httpx
import pytest

from secrev.errors import (
    AuthError,
    CommitNotFound,
    DiffTooLarge,
    RateLimited,
    RepoGone,
)
from secrev.mining import FixtureHost, GitHubHost, RecordStore, mine
from secrev.mining.types import ChangedFile, CommitRecord, RepoRecord, parse_utc


def host_with_pr_counts(counts) -> FixtureHost:
    repos = [
        {
            "owner": "acme", "name": f"repo{i}", "language": "Java",
            "pr_count": count, "default_branch": "main", "fork": False,
            "commits": [],
        }
        for i, count in enumerate(counts)
    ]
    return FixtureHost({"repos": repos})


class TestDiscoverRepos:
    def test_min_pr_boundary(self):
        host = host_with_pr_counts([10, 50, 500])
        repos = list(host.discover_repos("Java", 50))
        assert len(repos) == 2
        assert all(r.pr_count >= 50 for r in repos)

    def test_forty_nine_excluded(self):
        host = host_with_pr_counts([49])
        assert list(host.discover_repos("Java", 50)) == []

    def test_zero_threshold_emits_all(self):
        host = host_with_pr_counts([0, 1, 10])
        assert len(list(host.discover_repos("Java", 0))) == 3

    def test_language_filter(self):
        host = FixtureHost({"repos": [
            {"owner": "a", "name": "py", "language": "Python", "pr_count": 99,
             "default_branch": "main", "fork": False, "commits": []},
        ]})
        assert list(host.discover_repos("Java", 0)) == []

    def test_forks_excluded_by_default(self):
        data = {"repos": [
            {"owner": "a", "name": "f", "language": "Java", "pr_count": 99,
             "default_branch": "main", "fork": True, "commits": []},
        ]}
        assert list(FixtureHost(data).discover_repos("Java", 0)) == []
        assert len(list(FixtureHost(data, exclude_forks=False)
                        .discover_repos("Java", 0))) == 1

    def test_monotone_funnel(self):
        host = host_with_pr_counts([0, 10, 50, 120, 500])
        sizes = [len(list(host.discover_repos("Java", m))) for m in (0, 10, 50, 120, 501)]
        assert sizes == sorted(sizes, reverse=True)

    def test_determinism(self):
        host = host_with_pr_counts([10, 50, 500])
        a = [r.full_name for r in host.discover_repos("Java", 0)]
        b = [r.full_name for r in host.discover_repos("Java", 0)]
        assert a == b


class TestEnumerateCommits:
    def test_linear_history(self, funnel_host_data):
        # restrict to the three linear OK commits of the fixture
        host = FixtureHost(funnel_host_data)
        repo = next(host.discover_repos("Java", 0))
        commits = list(host.enumerate_commits(repo))
        assert len(commits) == 10
        assert len({c.sha for c in commits}) == 10
        merge_count = sum(1 for c in commits if c.parent_count >= 2)
        assert merge_count == 2
        # reverse-chronological ordering
        stamps = [c.authored_at for c in commits]
        assert stamps == sorted(stamps, reverse=True)

    def test_five_linear_commits(self):
        data = {"repos": [{
            "owner": "a", "name": "lin", "language": "Java", "pr_count": 60,
            "default_branch": "main", "fork": False,
            "commits": [
                {"sha": f"{i:040x}", "message": f"change {i}",
                 "parents": 0 if i == 0 else 1,
                 "authored_at": f"2024-01-{i + 1:02d}T00:00:00Z",
                 "files": [["src/A.java", "modified"]],
                 "diff": ""}
                for i in range(5)
            ],
        }]}
        host = FixtureHost(data)
        repo = next(host.discover_repos("Java", 0))
        commits = list(host.enumerate_commits(repo))
        assert len(commits) == 5
        assert all(c.parent_count <= 1 for c in commits)

    def test_empty_repo(self):
        host = host_with_pr_counts([100])
        repo = next(host.discover_repos("Java", 0))
        assert list(host.enumerate_commits(repo)) == []

    def test_unknown_repo(self):
        host = host_with_pr_counts([100])
        ghost = RepoRecord(host_id="fixture", owner="no", name="such",
                           primary_language="Java", pr_count=1, default_branch="main")
        with pytest.raises(RepoGone):
            list(host.enumerate_commits(ghost))


class TestFetchDiff:
    def test_single_line_change_one_hunk(self, funnel_host_data):
        host = FixtureHost(funnel_host_data)
        repo = next(host.discover_repos("Java", 0))
        sha = funnel_host_data["repos"][0]["commits"][0]["sha"]
        diff = host.fetch_commit_diff(repo, sha)
        hunk_headers = [l for l in diff.splitlines() if l.startswith("@@")]
        assert len(hunk_headers) == 1

    def test_binary_only_change(self):
        data = {"repos": [{
            "owner": "a", "name": "b", "language": "Java", "pr_count": 60,
            "default_branch": "main", "fork": False,
            "commits": [{
                "sha": "b" * 40, "message": "add logo", "parents": 1,
                "authored_at": "2024-01-01T00:00:00Z",
                "files": [["logo.png", "added"]],
                "diff": "diff --git a/logo.png b/logo.png\n"
                        "Binary files a/logo.png and b/logo.png differ\n",
            }],
        }]}
        host = FixtureHost(data)
        repo = next(host.discover_repos("Java", 0))
        diff = host.fetch_commit_diff(repo, "b" * 40)
        assert "Binary files" in diff
        assert not any(l.startswith("@@") for l in diff.splitlines())

    def test_unknown_sha(self, funnel_host_data):
        host = FixtureHost(funnel_host_data)
        repo = next(host.discover_repos("Java", 0))
        with pytest.raises(CommitNotFound):
            host.fetch_commit_diff(repo, "f" * 40)

    def test_oversized_diff(self, funnel_host_data):
        host = FixtureHost(funnel_host_data, diff_byte_cap=10)
        repo = next(host.discover_repos("Java", 0))
        sha = funnel_host_data["repos"][0]["commits"][0]["sha"]
        with pytest.raises(DiffTooLarge):
            host.fetch_commit_diff(repo, sha)


class TestRecordStore:
    def test_commit_roundtrip_and_dedup(self, tmp_path):
        store = RecordStore(tmp_path)
        commit = CommitRecord(
            repo="a/b", sha="c" * 40, message="m", parent_count=1,
            changed_files=(ChangedFile("X.java", "modified"),),
            authored_at=parse_utc("2024-01-01T00:00:00Z"))
        store.append_commit(commit)
        store.append_commit(commit)  # duplicate key: last write wins
        assert list(store.commits()) == [commit]
        assert store.has_commit("a/b", "c" * 40)
        assert not store.has_commit("a/b", "d" * 40)

    def test_diff_storage(self, tmp_path):
        store = RecordStore(tmp_path)
        store.put_diff("a/b", "c" * 40, "diff text\n")
        assert store.has_diff("a/b", "c" * 40)
        assert store.get_diff("a/b", "c" * 40) == "diff text\n"

    def test_concurrent_appends(self, tmp_path):
        store = RecordStore(tmp_path)

        def write(start):
            for i in range(start, start + 50):
                store.append_commit(CommitRecord(
                    repo="a/b", sha=f"{i:040x}", message=f"m{i}", parent_count=1,
                    changed_files=(ChangedFile("X.java", "modified"),),
                    authored_at=parse_utc("2024-01-01T00:00:00Z")))

        threads = [threading.Thread(target=write, args=(n * 50,)) for n in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert len(list(store.commits())) == 200


class TestMine:
    def test_full_fixture_run_resumable(self, tmp_path, funnel_host_data):
        host = FixtureHost(funnel_host_data)
        store = RecordStore(tmp_path / "store")
        report = mine(host, store, "Java", 50, workers=2)
        assert report.repos == 1
        assert report.commits == 10
        assert len(list(store.commits())) == 10

        # second run mines nothing new
        report2 = mine(host, store, "Java", 50, workers=2)
        assert report2.commits == 0
        assert report2.commits_skipped_existing == 10
        assert len(list(store.commits())) == 10

    def test_no_commits_for_undiscovered_repos(self, tmp_path, funnel_host_data):
        host = FixtureHost(funnel_host_data)
        store = RecordStore(tmp_path / "store")
        mine(host, store, "Java", 500, workers=2)  # widget has 120 PRs: excluded
        assert list(store.commits()) == []

    def test_oversized_diffs_skipped_and_counted(self, tmp_path, funnel_host_data):
        host = FixtureHost(funnel_host_data, diff_byte_cap=10)
        store = RecordStore(tmp_path / "store")
        report = mine(host, store, "Java", 50, workers=2)
        assert report.diffs_too_large == 10
        assert report.commits == 0


# --- GitHub client against a scripted httpx transport ---

def github_transport(handler):
    return httpx.MockTransport(handler)


def make_github(handler, **kwargs) -> GitHubHost:
    kwargs.setdefault("requests_per_minute", 100000)
    kwargs.setdefault("sleep", lambda s: None)
    return GitHubHost(transport=github_transport(handler), **kwargs)


class TestGitHubHost:
    def test_discovery_pagination_and_pr_counts(self):
        calls = []

        def handler(request: httpx.Request) -> httpx.Response:
            calls.append(str(request.url))
            if request.url.path == "/search/repositories":
                page = int(request.url.params.get("page", "1"))
                if page == 1:
                    items = [{"owner": {"login": "acme"}, "name": f"r{i}",
                              "default_branch": "main"} for i in range(100)]
                    return httpx.Response(200, json={"items": items})
                items = [{"owner": {"login": "acme"}, "name": "last",
                          "default_branch": "dev"}]
                return httpx.Response(200, json={"items": items})
            if request.url.path == "/search/issues":
                q = request.url.params["q"]
                count = 500 if "last" in q or "r1 " in q or q.endswith("r1 type:pr") else 7
                return httpx.Response(200, json={"total_count": count})
            raise AssertionError(f"unexpected {request.url}")

        host = make_github(handler)
        repos = list(host.discover_repos("Java", 50))
        names = [r.name for r in repos]
        assert "last" in names and "r1" in names
        assert all(r.pr_count >= 50 for r in repos)
        assert any("page=2" in url for url in calls)

    def test_rate_limit_retry_after_honored(self):
        state = {"calls": 0}

        def handler(request: httpx.Request) -> httpx.Response:
            state["calls"] += 1
            if state["calls"] <= 3:
                return httpx.Response(429, headers={"Retry-After": "0"})
            return httpx.Response(200, json={"total_count": 9})

        host = make_github(handler)
        assert host.pr_count("a", "b") == 9
        assert state["calls"] == 4

    def test_rate_limit_exhausted_raises(self):
        def handler(request: httpx.Request) -> httpx.Response:
            return httpx.Response(429, headers={"Retry-After": "0"})

        host = make_github(handler, max_retries=2)
        with pytest.raises(RateLimited):
            host.pr_count("a", "b")

    def test_auth_error(self):
        def handler(request: httpx.Request) -> httpx.Response:
            return httpx.Response(401)

        with pytest.raises(AuthError):
            make_github(handler).pr_count("a", "b")

    def test_enumerate_commits_with_details(self):
        listing = [{
            "sha": "a" * 40,
            "commit": {"message": "fix xss", "author": {"date": "2024-02-01T00:00:00Z"}},
            "parents": [{"sha": "b" * 40}],
        }]

        def handler(request: httpx.Request) -> httpx.Response:
            path = request.url.path
            if path == "/repos/acme/widget/commits":
                return httpx.Response(200, json=listing)
            if path == f"/repos/acme/widget/commits/{'a' * 40}":
                return httpx.Response(200, json={
                    "sha": "a" * 40,
                    "files": [{"filename": "src/A.java", "status": "modified"}],
                })
            raise AssertionError(path)

        host = make_github(handler)
        repo = RepoRecord(host_id="github", owner="acme", name="widget",
                          primary_language="Java", pr_count=100, default_branch="main")
        commits = list(host.enumerate_commits(repo))
        assert len(commits) == 1
        assert commits[0].parent_count == 1
        assert commits[0].changed_files[0].path == "src/A.java"

    def test_fetch_diff_and_cap(self):
        def handler(request: httpx.Request) -> httpx.Response:
            assert request.headers["Accept"] == "application/vnd.github.diff"
            return httpx.Response(200, text="--- a/f\n+++ b/f\n@@ -1,1 +1,1 @@\n-a\n+b\n")

        host = make_github(handler)
        repo = RepoRecord(host_id="github", owner="a", name="b",
                          primary_language="Java", pr_count=1, default_branch="main")
        diff = host.fetch_commit_diff(repo, "c" * 40)
        assert diff.startswith("--- a/f")

        capped = make_github(handler, diff_byte_cap=5)
        with pytest.raises(DiffTooLarge):
            capped.fetch_commit_diff(repo, "c" * 40)

    def test_commit_not_found(self):
        def handler(request: httpx.Request) -> httpx.Response:
            return httpx.Response(404)

        host = make_github(handler)
        repo = RepoRecord(host_id="github", owner="a", name="b",
                          primary_language="Java", pr_count=1, default_branch="main")
        with pytest.raises(CommitNotFound):
            host.fetch_commit_diff(repo, "c" * 40)
