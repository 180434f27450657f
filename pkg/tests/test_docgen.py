import httpx
import pytest

from lurelab.docgen import (
    SUBJECTS,
    DeterministicBackend,
    GenerationError,
    RemoteBackend,
    RetryableBackendError,
    UnknownSubjectError,
    build_prompt,
    file_name_for,
    generate_environment_set,
    infer_subject,
    infer_type,
    iter_catalog,
    make_backend,
    subjects_for_type,
)
from lurelab.model import (
    ALL_MOTIVES,
    CampaignConfig,
    DocumentType,
    GeneratorMode,
    MotiveId,
    OrgProfile,
)

ORG = OrgProfile()


class TestCatalog:
    def test_ten_subjects_per_type(self):
        assert set(SUBJECTS) == set(DocumentType)
        for subjects in SUBJECTS.values():
            assert len(subjects) == 10

    def test_subjects_unique_across_catalog(self):
        flat = [subject for _, subject in iter_catalog()]
        assert len(flat) == 50
        assert len(set(flat)) == 50

    def test_subjects_for_type_copies(self):
        listing = subjects_for_type(DocumentType.IT)
        listing.append("tampered")
        assert "tampered" not in SUBJECTS[DocumentType.IT]


class TestNames:
    def test_file_name_two_digit_occurrence(self):
        assert file_name_for("Budgets", 1, ".docx") == "Budgets01.docx"
        assert file_name_for("General Ledger", 12, ".docx") == "General Ledger12.docx"

    @pytest.mark.parametrize("doc_type,subject", list(iter_catalog()))
    def test_inference_round_trip(self, doc_type, subject):
        name = file_name_for(subject, 3, ".docx")
        assert infer_subject(name) == subject
        assert infer_type(name) is doc_type

    @pytest.mark.parametrize(
        "name", ["notes.txt", "Budgets.docx", "Mystery File01.docx", "", "01.docx"]
    )
    def test_inference_rejects_unknown(self, name):
        assert infer_subject(name) is None
        assert infer_type(name) is None


class TestPrompt:
    def test_contains_framing_and_parameters(self):
        prompt = build_prompt(DocumentType.FINANCIAL, "General Ledger", ORG)
        assert "world class movie prop text writer" in prompt
        assert "Pandora Papers" in prompt
        assert "Only respond with the document directly" in prompt
        assert ORG.company_name in prompt
        assert ORG.description in prompt
        assert 'Financial document with the subject "General Ledger"' in prompt

    def test_rejects_subject_type_mismatch(self):
        with pytest.raises(UnknownSubjectError):
            build_prompt(DocumentType.HR, "General Ledger", ORG)

    def test_type_labels(self):
        for doc_type, label in [
            (DocumentType.HR, "HR"),
            (DocumentType.IT, "IT"),
            (DocumentType.LEGAL, "Legal"),
            (DocumentType.OPERATIONAL, "Operational"),
        ]:
            subject = SUBJECTS[doc_type][0]
            assert f"{label} document" in build_prompt(doc_type, subject, ORG)


class TestDeterministicBackend:
    def test_pure_in_inputs(self):
        backend = DeterministicBackend()
        kwargs = dict(
            seed=3, doc_type=DocumentType.IT, subject="IT Asset Inventory", org=ORG
        )
        assert backend.complete("p", **kwargs) == backend.complete("p", **kwargs)

    def test_seed_changes_body(self):
        backend = DeterministicBackend()
        kwargs = dict(doc_type=DocumentType.IT, subject="IT Asset Inventory", org=ORG)
        assert backend.complete("p", seed=1, **kwargs) != backend.complete(
            "p", seed=2, **kwargs
        )

    def test_body_shape(self):
        body = DeterministicBackend().complete(
            "p", seed=0, doc_type=DocumentType.LEGAL, subject="Contracts", org=ORG
        )
        assert body.startswith(f"Title: Contracts of {ORG.company_name}")
        assert "Classification: Internal Use Only" in body
        assert "End of Contracts" in body
        assert "Account:" in body

    def test_bodies_avoid_campaign_vocabulary(self):
        backend = DeterministicBackend()
        banned = (
            "profit",
            "ideological",
            "geopolitical",
            "satisfaction",
            "discontent",
            "deception",
            "decoy",
            "score",
        )
        for doc_type, subject in iter_catalog():
            body = backend.complete(
                "p", seed=0, doc_type=doc_type, subject=subject, org=ORG
            ).lower()
            for word in banned:
                assert word not in body, (subject, word)


def _mock_remote(handler, retries=3):
    sleeps = []
    backend = RemoteBackend(
        base_url="https://llm.example/v1",
        api_key="k",
        model="m",
        retries=retries,
        client=httpx.Client(transport=httpx.MockTransport(handler)),
        sleep=sleeps.append,
    )
    return backend, sleeps


def _completion(text):
    return httpx.Response(200, json={"choices": [{"message": {"content": text}}]})


class TestRemoteBackend:
    KW = dict(seed=1, doc_type=DocumentType.FINANCIAL, subject="Budgets", org=ORG)

    def test_success(self):
        seen = {}

        def handler(request):
            seen["url"] = str(request.url)
            seen["auth"] = request.headers.get("authorization")
            return _completion("the document")

        backend, _ = _mock_remote(handler)
        assert backend.complete("prompt", **self.KW) == "the document"
        assert seen["url"] == "https://llm.example/v1/chat/completions"
        assert seen["auth"] == "Bearer k"

    def test_retries_throttling_then_succeeds(self):
        calls = []

        def handler(request):
            calls.append(1)
            if len(calls) < 3:
                return httpx.Response(429, json={})
            return _completion("ok")

        backend, sleeps = _mock_remote(handler)
        assert backend.complete("prompt", **self.KW) == "ok"
        assert len(calls) == 3
        assert len(sleeps) == 2

    def test_exhausted_retries_raise_retryable(self):
        backend, _ = _mock_remote(lambda request: httpx.Response(503), retries=2)
        with pytest.raises(RetryableBackendError):
            backend.complete("prompt", **self.KW)

    def test_client_error_is_not_retried(self):
        calls = []

        def handler(request):
            calls.append(1)
            return httpx.Response(400, json={"error": "bad"})

        backend, _ = _mock_remote(handler)
        with pytest.raises(GenerationError):
            backend.complete("prompt", **self.KW)
        assert len(calls) == 1

    def test_malformed_and_empty_responses_fail(self):
        backend, _ = _mock_remote(lambda request: httpx.Response(200, json={}))
        with pytest.raises(GenerationError):
            backend.complete("prompt", **self.KW)
        backend, _ = _mock_remote(lambda request: _completion("   "))
        with pytest.raises(GenerationError):
            backend.complete("prompt", **self.KW)

    def test_from_env_requires_key(self):
        with pytest.raises(GenerationError):
            RemoteBackend.from_env(env={})
        backend = RemoteBackend.from_env(
            env={"LURELAB_LLM_API_KEY": "k", "LURELAB_LLM_BASE_URL": "https://x/v1/"}
        )
        assert backend.base_url == "https://x/v1"


class TestMakeBackend:
    def test_deterministic_mode(self, tmp_path):
        config = CampaignConfig(root_dir=str(tmp_path))
        assert isinstance(make_backend(config), DeterministicBackend)

    def test_remote_mode_reads_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("LURELAB_LLM_API_KEY", "k")
        config = CampaignConfig(
            root_dir=str(tmp_path), generator_mode=GeneratorMode.REMOTE_LLM
        )
        assert isinstance(make_backend(config), RemoteBackend)


class TestEnvironmentSet:
    def test_full_motive_set_counts(self, tmp_path):
        config = CampaignConfig(root_dir=str(tmp_path))
        docs = generate_environment_set(ALL_MOTIVES, config)
        assert len(docs) == 50
        names = [d.file_name for d in docs]
        assert len(set(names)) == 50
        per_type = {t: 0 for t in DocumentType}
        for doc in docs:
            per_type[doc.doc_type] += 1
        assert all(count == 10 for count in per_type.values())

    def test_eliminated_type_absent(self, tmp_path):
        config = CampaignConfig(root_dir=str(tmp_path))
        remaining = tuple(m for m in ALL_MOTIVES if m is not MotiveId.IDEOLOGICAL)
        docs = generate_environment_set(remaining, config)
        assert len(docs) == 40
        assert all(doc.doc_type is not DocumentType.HR for doc in docs)

    def test_occurrence_suffix_cycles_catalog(self, tmp_path):
        config = CampaignConfig(root_dir=str(tmp_path), docs_per_type=12)
        docs = generate_environment_set((MotiveId.PROFIT, MotiveId.SATISFACTION), config)
        financial = [d.file_name for d in docs if d.doc_type is DocumentType.FINANCIAL]
        assert len(financial) == 12
        assert "General Ledger01.docx" in financial
        assert "General Ledger02.docx" in financial
        assert "Tax Documents02.docx" in financial

    def test_same_config_same_set(self, tmp_path):
        config = CampaignConfig(root_dir=str(tmp_path))
        first = generate_environment_set(ALL_MOTIVES, config)
        second = generate_environment_set(ALL_MOTIVES, config)
        assert first == second

    def test_rejects_duplicate_motives(self, tmp_path):
        config = CampaignConfig(root_dir=str(tmp_path))
        with pytest.raises(ValueError):
            generate_environment_set((MotiveId.PROFIT, MotiveId.PROFIT), config)
