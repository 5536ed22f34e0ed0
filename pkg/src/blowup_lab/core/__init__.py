"""數值核心與專案基礎設定

此套件包含：
- geometry / kernel / quadrature: 區域、輻射邊界排程與 Neumann 熱核
- solver / discretization / lifespan / representation: 有限差分求解器、T* 外插與表示式求解
- series / schedule_constants / bounds: 排程常數管線與 lifespan 的估計
- seqlab: 里程碑數列的實驗
- project_config / paths / pyproject_config: 版本、路徑與 pyproject.toml 的產生
"""

from .errors import BlowupLabError
from .paths import ProjectPaths
from .project_config import ProjectInfo
from .pyproject_config import generate_toml_config

__all__ = ["BlowupLabError", "ProjectPaths", "ProjectInfo", "generate_toml_config"]
