from typing import Literal, Optional

from fastapi import FastAPI, HTTPException
from fastapi.responses import StreamingResponse
from pydantic import BaseModel, Field

from kacward.cli.commands import CommandResult, execute
from kacward.cli.config import RunConfig
from kacward.serve.docs import description, openapi_url, tags_metadata, terms_of_service, title, version
from kacward.serve.utils import load_config_and_initialize_runs, stream_text_data


class ThermoPayload(BaseModel):
    K: Optional[float] = Field(None, description="Single coupling")
    kmin: Optional[float] = Field(None, description="First coupling of a grid")
    kmax: Optional[float] = Field(None, description="Last coupling of a grid")
    steps: Optional[int] = Field(None, description="Number of grid points")
    method: Optional[Literal['grid', 'line']] = Field(None, description="Free-energy quadrature route")
    quad_res: Optional[int] = Field(None, description="Quadrature nodes per axis")
    format: Literal['json', 'csv'] = Field('json', description="Rows as JSON objects or a streamed CSV")


class VerifyPayload(BaseModel):
    N: int = Field(3, description="Lattice size")
    max_order: int = Field(8, description="Highest order of the identity checks")
    quad_res: Optional[int] = Field(None, description="Starting quadrature resolution")


class PolynomialPayload(BaseModel):
    N: int = Field(..., description="Lattice size")


class AmplitudePayload(BaseModel):
    n: int = Field(..., description="Number of steps")
    x: int = Field(0, description="Target column")
    y: int = Field(0, description="Target row")
    direction: Optional[Literal['U', 'D', 'L', 'R']] = Field(None, description="Arrival direction")
    u: float = Field(0.2, description="Weight per step")


class RunPayload(BaseModel):
    name: str = Field(..., description="Name of a configured run")


def _execute(cfg_or_command, **fields) -> CommandResult:
    try:
        cfg = cfg_or_command if isinstance(cfg_or_command, RunConfig) else RunConfig(
            command=cfg_or_command, **fields)
        return execute(cfg)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except ArithmeticError as e:
        raise HTTPException(status_code=422, detail=str(e))


def create_app(
        config_file_path: Optional[str] = None,
        env_file_path: Optional[str] = None,
        api_title: str = None,
        api_description: str = None,
        api_version: str = None,
        api_term_of_service: str = None) -> FastAPI:
    """
    Create a FastAPI instance serving the kacward routes, with named runs from an optional config.yaml.

    ```python
    from kacward.serve import create_app
    import uvicorn
    import requests

    app = create_app("config.yaml", ".env")
    uvicorn.run(app, host="0.0.0.0", port=8000)

    response = requests.post('http://0.0.0.0:8000/thermo', json={"kmin": 0.1, "kmax": 0.8, "steps": 8})
    print(response.json())
    ```

    Parameters:
        config_file_path (str): Path to a YAML configuration file with a `runs:` list.
        env_file_path (str): Path to the .env file.
        api_title (str): Title of the API.
        api_description (str): Description of the API.
        api_version (str): Version of the API.
        api_term_of_service (str): Term of service of the API.

    Returns:
        FastAPI: The initialized FastAPI instance.
    """
    app = FastAPI(
        title=title if api_title is None else api_title,
        description=description if api_description is None else api_description,
        version=version if api_version is None else api_version,
        openapi_url=openapi_url,
        terms_of_service=terms_of_service if api_term_of_service is None else api_term_of_service,
        openapi_tags=tags_metadata,
    )

    runs = {}
    if config_file_path is not None:
        runs = load_config_and_initialize_runs(config_file_path, env_file_path)

    @app.get("/critical", tags=["thermodynamics"])
    def critical():
        return _execute('critical').payload

    @app.post("/thermo", tags=["thermodynamics"])
    def thermo(payload: ThermoPayload):
        fields = payload.model_dump(exclude_none=True, exclude={'format'})
        result = _execute('thermo', **fields)
        if payload.format == 'csv':
            return StreamingResponse(stream_text_data(result.render('csv')), media_type='text/csv')
        return result.payload

    @app.post("/polynomial", tags=["combinatorics"])
    def polynomial(payload: PolynomialPayload):
        return _execute('graphs', N=payload.N).payload

    @app.post("/amplitude", tags=["combinatorics"])
    def amplitude(payload: AmplitudePayload):
        return _execute('amplitude', **payload.model_dump(exclude_none=True)).payload

    @app.post("/verify", tags=["verification"])
    def verify(payload: VerifyPayload):
        return _execute('verify', **payload.model_dump(exclude_none=True)).payload

    @app.post("/run", tags=["verification"])
    def run(payload: RunPayload):
        if payload.name not in runs:
            raise HTTPException(status_code=400, detail="Invalid run name")

        cfg = runs[payload.name]
        result = _execute(cfg)
        if cfg.format == 'csv':
            return StreamingResponse(stream_text_data(result.render('csv')), media_type='text/csv')
        return {'name': cfg.name, 'command': cfg.command, 'passed': result.passed, 'result': result.payload}

    return app
