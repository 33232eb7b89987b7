"""Download the Kodak test images from a user-supplied mirror."""

import os
import urllib.error
import urllib.request

from additive_unet.errors import DataError

KODAK_NAMES = [f"kodim{i:02d}.png" for i in range(1, 25)]


def fetch_dataset(
    base_url: str, dest: str, names: list[str] | None = None, timeout: int = 30
) -> list[str]:
    """
    Download images `base_url/<name>` into `dest`, skipping files already present.

    Args:
        base_url: Mirror URL the file names are appended to.
        dest: Target directory (created if needed).
        names: File names to fetch; defaults to kodim01.png .. kodim24.png.
        timeout: Per-request timeout in seconds.

    Returns:
        Paths of the local files.

    Raises:
        DataError: If a download fails.
    """
    os.makedirs(dest, exist_ok=True)
    paths = []
    for name in names or KODAK_NAMES:
        path = os.path.join(dest, name)
        if not os.path.exists(path):
            url = f"{base_url.rstrip('/')}/{name}"
            try:
                with urllib.request.urlopen(url, timeout=timeout) as response:
                    data = response.read()
            except (urllib.error.URLError, TimeoutError, OSError) as e:
                raise DataError(f"download failed for {url}: {e}")
            with open(path, "wb") as f:
                f.write(data)
            print(f"  fetched {name} ({len(data)} bytes)")
        paths.append(path)
    return paths
