"""Client for the simulator service.

By default requests are served in process through an ASGI transport, so no
server needs to be running; pass a server URL to talk to a remote instance
instead. Either way the CLI and any other caller go through the same HTTP
surface and schemas.
"""

from __future__ import annotations

import asyncio
from typing import Any

import httpx

from .service.models import (
    ImageRequest,
    ImageResponse,
    ProbsRequest,
    ProbsResponse,
    SweepRequest,
    SweepResponse,
)

__all__ = ["ServiceClient", "ServiceError", "ServiceUnavailable"]


class ServiceError(RuntimeError):
    """The service rejected the request (4xx) or failed on it (5xx)."""

    def __init__(self, status_code: int, detail: str):
        super().__init__(f"service returned {status_code}: {detail}")
        self.status_code = status_code
        self.detail = detail


class ServiceUnavailable(RuntimeError):
    """The service could not be reached at all."""


class ServiceClient:
    def __init__(self, server_url: str | None = None, timeout: float = 300.0):
        self._server_url = server_url
        self._timeout = timeout
        self._app = None
        if server_url is None:
            from .service.app import create_app

            self._app = create_app()

    def _client(self) -> httpx.AsyncClient:
        if self._app is not None:
            return httpx.AsyncClient(
                transport=httpx.ASGITransport(app=self._app),
                base_url="http://cfgi.internal",
                timeout=self._timeout,
            )
        return httpx.AsyncClient(base_url=self._server_url, timeout=self._timeout)

    async def _post_async(self, path: str, payload: dict[str, Any]) -> dict[str, Any]:
        try:
            async with self._client() as client:
                response = await client.post(path, json=payload)
        except httpx.HTTPError as exc:
            raise ServiceUnavailable(f"cannot reach service: {exc}") from exc
        if response.status_code >= 400:
            try:
                detail = response.json().get("detail", response.text)
            except ValueError:
                detail = response.text
            raise ServiceError(response.status_code, str(detail))
        return response.json()

    def _post(self, path: str, payload: dict[str, Any]) -> dict[str, Any]:
        return asyncio.run(self._post_async(path, payload))

    def healthz(self) -> dict[str, Any]:
        async def go() -> dict[str, Any]:
            try:
                async with self._client() as client:
                    response = await client.get("/healthz")
            except httpx.HTTPError as exc:
                raise ServiceUnavailable(f"cannot reach service: {exc}") from exc
            if response.status_code >= 400:
                raise ServiceError(response.status_code, response.text)
            return response.json()

        return asyncio.run(go())

    def probs(self, request: ProbsRequest) -> ProbsResponse:
        data = self._post("/probs", request.model_dump(mode="json"))
        return ProbsResponse.model_validate(data)

    def sweep(self, request: SweepRequest) -> SweepResponse:
        data = self._post("/sweep", request.model_dump(mode="json"))
        return SweepResponse.model_validate(data)

    def image(self, request: ImageRequest) -> ImageResponse:
        data = self._post("/image", request.model_dump(mode="json"))
        return ImageResponse.model_validate(data)
