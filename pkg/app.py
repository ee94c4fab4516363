import sys

from modules.cli import main

if __name__ == "__main__":
    # Uso: python app.py {solve,sensitivity,sweep,verify} problema.json [opciones]
    try:
        sys.exit(main())
    except Exception as e:
        print(f"ERROR: An unhandled exception occurred: {e}", file=sys.stderr)
        import traceback
        traceback.print_exc()  # Traza completa para depurar
        sys.exit(1)
