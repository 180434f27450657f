"""Decoy document generation.

Two interchangeable text backends sit behind one prompt: a remote
chat-completion service for live campaigns, and a seeded offline writer that
renders ledger-style records so tests and exercises run without network
access. Both are driven by the same prompt text; the offline writer
additionally receives the structured request so it does not have to parse
its own prompt.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
import time
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Protocol, Sequence

import httpx

from .model import (
    CampaignConfig,
    DocumentType,
    GeneratorMode,
    MotiveId,
    OrgProfile,
    type_for_motive,
)


class GenerationError(Exception):
    """Document text could not be produced."""


class RetryableBackendError(GenerationError):
    """Transient backend failure (unreachable, throttled); safe to retry."""


class UnknownSubjectError(ValueError):
    """Subject is not in the catalog for the requested document type."""


# Subject catalog: exactly ten subjects per document type, in catalog order.
SUBJECTS: dict[DocumentType, tuple[str, ...]] = {
    DocumentType.FINANCIAL: (
        "General Ledger",
        "Tax Documents",
        "Financial Contracts",
        "Payroll Documents",
        "Compliance and Regulatory Documents",
        "Budgets",
        "Financial Statements",
        "Financial Reports",
        "Audited Financial Statements",
        "Invoices and Purchase Orders",
    ),
    DocumentType.HR: (
        "Time and Attendance Records",
        "Employee Benefit Documents",
        "Training and Development Plans",
        "Employee Handbook",
        "Employee Records",
        "Exit Interview Forms",
        "Performance Appraisal Forms",
        "Offer Letters",
        "Employment Contracts",
        "Job Descriptions",
    ),
    DocumentType.IT: (
        "IT Asset Inventory",
        "IT Policies and Procedures",
        "Security Policies and Procedures",
        "Vendor Contracts and Service Level Agreements",
        "Disaster Recovery and Business Continuity Plans",
        "System Documentation",
        "Change Management Documents",
        "IT Project Documentation",
        "Incident and Problem Reports",
        "IT Service Level Agreements (SLAs)",
    ),
    DocumentType.LEGAL: (
        "Non-Disclosure Agreements (NDAs)",
        "Compliance Documentation",
        "Corporate Governance Documents",
        "Litigation and Legal Proceedings Documents",
        "Legal Opinions and Memoranda",
        "Policies and Procedures",
        "Regulatory Filings",
        "Legal Research and Case Law",
        "Contracts",
        "Intellectual Property Documents",
    ),
    DocumentType.OPERATIONAL: (
        "Safety Procedures",
        "Standard Operating Procedures (SOPs)",
        "Change Request Forms",
        "Inventory and Stock Control Documents",
        "Incident Reports",
        "Performance Metrics and Dashboards",
        "Maintenance and Equipment Manuals",
        "Quality Control Documents",
        "Work Instructions",
        "Production Plans",
    ),
}

_TYPE_LABELS: dict[DocumentType, str] = {
    DocumentType.FINANCIAL: "Financial",
    DocumentType.HR: "HR",
    DocumentType.OPERATIONAL: "Operational",
    DocumentType.IT: "IT",
    DocumentType.LEGAL: "Legal",
}

# Flat name-to-type index; subjects are unique across the whole catalog.
SUBJECT_TYPE_INDEX: dict[str, DocumentType] = {
    subject: doc_type
    for doc_type, subjects in SUBJECTS.items()
    for subject in subjects
}

_PROMPT_TEMPLATE = (
    "You are a world class movie prop text writer.\n"
    "I need you to draft a document that looks EXACTLY like a document that "
    "would look like it was included in the corpus of documents recovered in "
    "the Pandora Papers scandal for a dramatized version of the event. It "
    "must be as accurate as possible for realism. It should be for a company "
    "called {company}, {description}. The type of document should be a "
    '{type_label} document with the subject "{subject}".\n'
    "Respond with the document in a well-organized text file.\n"
    "Think through it carefully before responding.\n"
    "Only respond with the document directly, do not add any additional "
    "commentary or explanation (for realism).\n"
)


@dataclass(frozen=True)
class GeneratedDocument:
    doc_type: DocumentType
    subject: str
    file_name: str
    body: str

    def __post_init__(self) -> None:
        if not self.body:
            raise ValueError("document body must be non-empty")


def subjects_for_type(doc_type: DocumentType) -> list[str]:
    """The ten catalog subjects for a document type, in catalog order."""
    return list(SUBJECTS[DocumentType(doc_type)])


def file_name_for(subject: str, occurrence: int, extension: str) -> str:
    """Subject plus a zero-padded two-digit occurrence index, e.g. 'Budgets01.docx'."""
    return f"{subject}{occurrence:02d}{extension}"


def build_prompt(doc_type: DocumentType, subject: str, org: OrgProfile) -> str:
    """Render the generation prompt for one decoy document.

    The text asks for prop writing in the style of a well-known document
    leak so the backend produces plausibly real corporate records.
    """
    doc_type = DocumentType(doc_type)
    if subject not in SUBJECTS[doc_type]:
        raise UnknownSubjectError(f"{subject!r} is not a {doc_type.value} subject")
    return _PROMPT_TEMPLATE.format(
        company=org.company_name,
        description=org.description,
        type_label=_TYPE_LABELS[doc_type],
        subject=subject,
    )


class TextBackend(Protocol):
    def complete(
        self,
        prompt: str,
        *,
        seed: int,
        doc_type: DocumentType,
        subject: str,
        org: OrgProfile,
    ) -> str:  # pragma: no cover - interface
        ...


_ACCOUNTS = (
    "Cash",
    "Reserve Account",
    "Capital",
    "Income",
    "Expenses",
    "Escrow",
    "Receivables",
)

_ENTRIES = (
    "Investment Received",
    "Transfer to Reserve Acct",
    "Transfer from Cash Acct",
    "Quarterly Returns",
    "Operating Expenses",
    "Service Fees",
    "Vendor Payment",
    "Retainer Fees",
    "Asset Acquisition",
    "License Renewal",
    "Consulting Invoice",
    "Insurance Premium",
    "Equipment Lease",
    "Tax Provision",
    "Payroll Run",
    "Audit Adjustment",
    "Client Settlement",
    "Interest Accrued",
)


@lru_cache(maxsize=4096)
def _render_offline_body(
    doc_type: DocumentType, subject: str, org: OrgProfile, seed: int
) -> str:
    material = json.dumps(
        [doc_type.value, subject, org.company_name, org.description, seed],
        sort_keys=True,
        separators=(",", ":"),
    ).encode("utf-8")
    rng = random.Random(int.from_bytes(hashlib.sha256(material).digest()[:8], "big"))

    year = rng.randint(2018, 2023)
    ref = f"{''.join(w[0] for w in org.company_name.split()[:3]).upper()}-{rng.randint(100000, 999999)}"
    lines = [
        f"Title: {subject} of {org.company_name}",
        f"Period: January {year} to December {year}",
        f"Reference: {ref}",
        "Classification: Internal Use Only",
        "",
    ]
    for account in rng.sample(_ACCOUNTS, k=rng.randint(3, 4)):
        lines.append(f"Account: {account}")
        lines.append("-" * 39)
        lines.append(
            f"{'Date':<13}{'Description':<29}{'Debit':>11}{'Credit':>12}{'Balance':>14}"
        )
        lines.append("-" * 79)
        balance = rng.randrange(1, 80) * 100_000
        lines.append(
            f"{f'01/01/{year}':<13}{'Opening Balance':<29}{'-':>11}{'-':>12}{balance:>14,}"
        )
        month = 1
        for _ in range(rng.randint(3, 5)):
            month = min(12, month + rng.randint(0, 3))
            day = rng.randint(1, 28)
            entry = rng.choice(_ENTRIES)
            amount = rng.randrange(1, 200) * 25_000
            if rng.random() < 0.5:
                debit, credit = f"{amount:,}", "-"
                balance += amount
            else:
                debit, credit = "-", f"{amount:,}"
                balance -= amount
            lines.append(
                f"{f'{month:02d}/{day:02d}/{year}':<13}{entry:<29}{debit:>11}{credit:>12}{balance:>14,}"
            )
        lines.append("")
    lines.append("=-=-=-=-=-=-=-=-=-=")
    lines.append(f"End of {subject}")
    lines.append("=-=-=-=-=-=-=-=-=-=")
    return "\n".join(lines) + "\n"


class DeterministicBackend:
    """Offline prop writer: seeded, pure in (type, subject, org, seed).

    Produces ledger-style records with pseudo-random figures, enough for a
    participant to have something plausible to read. No I/O.
    """

    def complete(
        self,
        prompt: str,
        *,
        seed: int,
        doc_type: DocumentType,
        subject: str,
        org: OrgProfile,
    ) -> str:
        return _render_offline_body(DocumentType(doc_type), subject, org, seed)


class RemoteBackend:
    """Chat-completion backend speaking the common /chat/completions shape."""

    def __init__(
        self,
        base_url: str,
        api_key: str,
        model: str,
        timeout: float = 60.0,
        retries: int = 3,
        client: httpx.Client | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        self.base_url = base_url.rstrip("/")
        self.api_key = api_key
        self.model = model
        self.retries = retries
        self._sleep = sleep
        self._client = client or httpx.Client(timeout=timeout)

    @classmethod
    def from_env(cls, env: dict[str, str] | None = None) -> "RemoteBackend":
        env = os.environ if env is None else env
        api_key = env.get("LURELAB_LLM_API_KEY") or env.get("OPENAI_API_KEY")
        if not api_key:
            raise GenerationError(
                "remote generation needs LURELAB_LLM_API_KEY or OPENAI_API_KEY"
            )
        return cls(
            base_url=env.get("LURELAB_LLM_BASE_URL", "https://api.openai.com/v1"),
            api_key=api_key,
            model=env.get("LURELAB_LLM_MODEL", "gpt-3.5-turbo"),
        )

    def complete(
        self,
        prompt: str,
        *,
        seed: int,
        doc_type: DocumentType,
        subject: str,
        org: OrgProfile,
    ) -> str:
        payload = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "seed": seed % (2**31),
        }
        headers = {"Authorization": f"Bearer {self.api_key}"}
        last_error: Exception | None = None
        for attempt in range(self.retries):
            try:
                response = self._client.post(
                    f"{self.base_url}/chat/completions", json=payload, headers=headers
                )
            except httpx.TransportError as exc:
                last_error = exc
                self._sleep(0.5 * 2**attempt)
                continue
            if response.status_code == 429 or response.status_code >= 500:
                last_error = GenerationError(
                    f"backend returned {response.status_code}"
                )
                self._sleep(0.5 * 2**attempt)
                continue
            if response.status_code != 200:
                raise GenerationError(
                    f"backend rejected request: {response.status_code} {response.text[:200]}"
                )
            try:
                body = response.json()["choices"][0]["message"]["content"]
            except (KeyError, IndexError, ValueError) as exc:
                raise GenerationError(f"malformed completion response: {exc}") from exc
            if not body or not body.strip():
                raise GenerationError("backend returned an empty completion")
            return body
        raise RetryableBackendError(
            f"backend unreachable after {self.retries} attempts: {last_error}"
        )


def make_backend(config: CampaignConfig) -> TextBackend:
    if config.generator_mode is GeneratorMode.DETERMINISTIC:
        return DeterministicBackend()
    return RemoteBackend.from_env()


def generate_text(
    prompt: str,
    backend: TextBackend,
    seed: int,
    *,
    doc_type: DocumentType,
    subject: str,
    org: OrgProfile,
) -> str:
    """Produce one document body from a prompt via the configured backend."""
    body = backend.complete(
        prompt, seed=seed, doc_type=doc_type, subject=subject, org=org
    )
    if not body:
        raise GenerationError("generated body is empty")
    return body


def generate_environment_set(
    remaining: Sequence[MotiveId],
    config: CampaignConfig,
    backend: TextBackend | None = None,
) -> list[GeneratedDocument]:
    """Generate the full decoy set for one environment.

    Every motive still in play contributes `docs_per_type` documents of its
    mapped type and nothing else; subjects cycle through the catalog with the
    occurrence index bumped on each pass.
    """
    motives = [MotiveId(m) for m in remaining]
    if not motives:
        raise ValueError("at least one motive is required")
    if len(set(motives)) != len(motives):
        raise ValueError("remaining motives must be distinct")

    backend = backend if backend is not None else make_backend(config)
    documents: list[GeneratedDocument] = []
    for motive in motives:
        doc_type = type_for_motive(motive)
        catalog = SUBJECTS[doc_type]
        for i in range(config.docs_per_type):
            subject = catalog[i % len(catalog)]
            prompt = build_prompt(doc_type, subject, config.org_profile)
            body = generate_text(
                prompt,
                backend,
                config.seed,
                doc_type=doc_type,
                subject=subject,
                org=config.org_profile,
            )
            documents.append(
                GeneratedDocument(
                    doc_type=doc_type,
                    subject=subject,
                    file_name=file_name_for(
                        subject, i // len(catalog) + 1, config.file_extension
                    ),
                    body=body,
                )
            )
    return documents


def infer_subject(file_name: str) -> str | None:
    """Recover the catalog subject from a generated file name, if any."""
    stem = file_name.rsplit(".", 1)[0] if "." in file_name else file_name
    if len(stem) < 3 or not stem[-2:].isdigit():
        return None
    subject = stem[:-2]
    return subject if subject in SUBJECT_TYPE_INDEX else None


def infer_type(file_name: str) -> DocumentType | None:
    """Document type implied by a generated file name, if recognizable."""
    subject = infer_subject(file_name)
    return SUBJECT_TYPE_INDEX[subject] if subject else None


def iter_catalog() -> Iterable[tuple[DocumentType, str]]:
    for doc_type, subjects in SUBJECTS.items():
        for subject in subjects:
            yield doc_type, subject
