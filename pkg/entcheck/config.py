from pydantic_settings import BaseSettings, SettingsConfigDict

class Settings(BaseSettings):
    # Tolerancias por defecto (ENTCHECK_TOL_MAG, ENTCHECK_TOL_ANG, ENTCHECK_TOL_RANK)
    TOL_MAG: float = 1e-9
    TOL_ANG: float = 1e-9
    TOL_RANK: float = 1e-10

    LOG_LEVEL: str = "WARNING"

    #Pipeline
    ORACLE_CHECK: bool = True
    DEFAULT_METHOD: str = "auto"

    #Cantidad de estados generados por familia en `entcheck corpus`
    CORPUS_SIZE: int = 200

    model_config = SettingsConfigDict(
        env_prefix="ENTCHECK_",
        env_file=".env",
        extra="ignore",
    )

settings = Settings()
