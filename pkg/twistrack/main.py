from contextlib import asynccontextmanager
import logging

from fastapi import FastAPI

from twistrack import __version__
from twistrack.config import get_settings
from twistrack.health import router as health_router
from twistrack.tools.classify import router as classify_router
from twistrack.tools.torus import router as torus_router
from twistrack.tools.verify import router as verify_router


def configure_logging(level: str | int = logging.INFO) -> None:
    """Install the twistrack log format, or only adjust the level if logging is set up."""
    root_logger = logging.getLogger()
    if not root_logger.handlers:
        logging.basicConfig(
            level=level,
            format="%(asctime)s %(levelname)s [%(name)s] %(message)s",
        )
    else:
        root_logger.setLevel(level)


logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    settings = get_settings()
    configure_logging(settings.log_level)
    logger.info("Application settings on startup: %s", settings.model_dump(mode="json"))
    try:
        yield
    finally:
        logger.info("Application shutdown complete.")


app = FastAPI(title="twistrack", version=__version__, lifespan=lifespan, redirect_slashes=False)

app.include_router(classify_router, prefix="/classify")
app.include_router(torus_router, prefix="/torus")
app.include_router(verify_router, prefix="/verify")
app.include_router(health_router)
