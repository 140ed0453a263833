from dotenv import load_dotenv

load_dotenv()  # To be able to pick up KACWARD_BRUTE_MAX_N from a .env file
