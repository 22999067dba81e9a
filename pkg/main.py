import os
import sys

from dotenv import load_dotenv

load_dotenv()

# OpenMP reads its pool size once at load; app.main.pin_threads handles the rest at runtime
threads = "1" if "--bench" in sys.argv[1:] else os.getenv("DC_THREADS")
if threads:
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ[var] = threads

from app.main import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
