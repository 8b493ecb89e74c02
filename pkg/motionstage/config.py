"""Application configuration."""

from typing import Literal

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings."""

    llm_backend: Literal["http", "anthropic"] = "http"
    llm_endpoint: str = ""
    llm_token: str = ""
    llm_model: str = ""
    llm_max_attempts: int = 3
    llm_backoff_seconds: float = 0.5
    llm_timeout_seconds: float = 30.0
    log_level: str = "INFO"

    model_config = SettingsConfigDict(env_file=".env", extra="ignore")


settings = Settings()
